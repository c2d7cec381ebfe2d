#include "spotscale/cloudsim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spotscale {
namespace {

constexpr double kEps = 1e-9;

}  // namespace

void SimConfig::validate() const {
  if (interval <= 0) throw std::invalid_argument("monitoring interval must be positive");
  if (!(billing_period > 0.0)) throw std::invalid_argument("billing period must be positive");
  if (launch_delay < 0.0) throw std::invalid_argument("launch delay must be non-negative");
  if (price_per_instance_hour < 0.0) throw std::invalid_argument("price must be non-negative");
  if (transport_overhead < 0.0) throw std::invalid_argument("transport overhead must be non-negative");
  if (!(per_workload_cap > 0.0)) throw std::invalid_argument("per-workload cap must be positive");
  if (!(footprint_fraction > 0.0 && footprint_fraction <= 1.0))
    throw std::invalid_argument("footprint fraction must lie in (0, 1]");
  if (!(bootstrap_rate > 0.0)) throw std::invalid_argument("bootstrap rate must be positive");
  if (deadline_guard < 0.0) throw std::invalid_argument("deadline guard must be non-negative");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be non-negative");
  if (!(as_period > 0.0)) throw std::invalid_argument("autoscaler period must be positive");
  if (estimation.arma_delta < 0.0 || estimation.arma_gamma < 0.0 ||
      estimation.arma_delta + estimation.arma_gamma > 1.0)
    throw std::invalid_argument("ARMA weights must be non-negative and sum to at most one");
  if (!(estimation.process_var > 0.0 && estimation.measurement_var > 0.0))
    throw std::invalid_argument("noise variances must be positive");
  aimd.validate();
}

int SimConfig::resolved_initial_fleet() const {
  if (initial_fleet >= 0) return initial_fleet;
  return static_cast<int>(std::llround(aimd.n_min));
}

double lower_bound_cost(Seconds useful_cus, Seconds billing_period, double price) {
  if (useful_cus <= 0.0) return 0.0;
  return std::ceil(useful_cus / billing_period - kEps) * price;
}

double lower_bound_cost(const SimReport& report) {
  return lower_bound_cost(report.useful_cus, report.billing_period, report.price_per_instance_hour);
}

Simulation::Simulation(SimConfig config, Scenario scenario)
    : config_(std::move(config)),
      scenario_(std::move(scenario)),
      ledger_(config_.price_per_instance_hour),
      controller_(config_.controller, config_.aimd, config_.as_period, config_.as_threshold) {
  config_.validate();
  clock_.interval = config_.interval;

  const std::size_t window = config_.estimation.arma_window > 0
                                 ? config_.estimation.arma_window
                                 : default_arma_window(static_cast<Seconds>(config_.interval));
  Seconds last_arrival = 0.0;
  Seconds longest_ttc = 0.0;
  for (const auto& spec : scenario_.workloads) {
    if (spec.tasks.empty()) throw std::invalid_argument("workload without tasks");
    if (table_.count(spec.id)) throw std::invalid_argument("duplicate workload id");
    Job job;
    job.spec = spec;
    job.state.id = spec.id;
    job.state.requested_ttc = spec.requested_ttc;
    job.state.per_workload_cap = config_.per_workload_cap;

    std::vector<TaskRecord> records;
    records.reserve(spec.tasks.size());
    for (const auto& t : spec.tasks) {
      if (!(t.duration > 0.0)) throw std::invalid_argument("task durations must be positive");
      records.push_back({t.type, t.duration * (1.0 + config_.transport_overhead),
                         t.gated ? TaskStatus::blocked : TaskStatus::pending});
    }
    WorkloadTasks tasks(spec.id, std::move(records), spec.deadband);
    for (TypeId type : tasks.types()) {
      Population pop{type, CusEstimator(config_.estimator, config_.estimation, window), 1, 0, 0, 0,
                     0.0, std::nullopt};
      job.pops.push_back(std::move(pop));
      job.state.populations.push_back({type, tasks.population(type), 0.0});
    }
    job.true_cus = true_mean_cus(spec, job.pops.front().type, config_.transport_overhead);
    table_.emplace(spec.id, std::move(tasks));
    last_arrival = std::max(last_arrival, spec.arrival);
    longest_ttc = std::max(longest_ttc, spec.requested_ttc);
    jobs_.push_back(std::move(job));
  }
  horizon_ = config_.horizon > 0.0 ? config_.horizon : last_arrival + 10.0 * longest_ttc;

  report_.scenario = scenario_.name;
  report_.controller = config_.controller;
  report_.estimator = config_.estimator;
  report_.billing_period = config_.billing_period;
  report_.price_per_instance_hour = config_.price_per_instance_hour;

  for (int i = 0; i < config_.resolved_initial_fleet(); ++i) launch(0.0, true);
}

void Simulation::launch(Seconds at, bool ready_now) {
  Machine m;
  m.rec.id = next_instance_++;
  m.rec.billing_remaining = config_.billing_period;
  m.rec.state = ready_now ? InstanceState::idle : InstanceState::launching;
  m.rec.launch_delay_remaining = ready_now ? 0.0 : config_.launch_delay;
  m.ready_at = ready_now ? at : at + config_.launch_delay;
  m.busy_until = m.ready_at;
  m.window_start = m.ready_at;
  ledger_.charge(m.rec.cus_per_instance);
  machines_.push_back(std::move(m));
  report_.max_fleet = std::max(report_.max_fleet, static_cast<int>(machines_.size()));
}

bool Simulation::active(const Job& j) const {
  return j.admitted && !j.completion;
}

bool Simulation::finished() const {
  return std::all_of(jobs_.begin(), jobs_.end(),
                     [](const Job& j) { return j.admitted && j.completion.has_value(); });
}

Simulation::Population* Simulation::population(Job& j, TypeId type) {
  for (auto& p : j.pops)
    if (p.type == type) return &p;
  return nullptr;
}

Simulation::Machine* Simulation::machine(InstanceId id) {
  for (auto& m : machines_)
    if (m.rec.id == id) return &m;
  return nullptr;
}

int Simulation::alive_count() const {
  return static_cast<int>(std::count_if(machines_.begin(), machines_.end(), [](const Machine& m) {
    return m.rec.state != InstanceState::terminating;
  }));
}

double Simulation::free_fraction(const Machine& m) const {
  if (m.rec.state == InstanceState::terminating) return 0.0;
  const Seconds from = std::max({now(), m.busy_until, m.ready_at});
  return std::clamp((now() + interval() - from) / interval(), 0.0, 1.0);
}

ComputeUnits Simulation::in_flight(WorkloadId w) const {
  const Seconds lo = now();
  const Seconds hi = now() + interval();
  Seconds busy = 0.0;
  for (const auto& m : machines_)
    for (const auto& rc : m.queue)
      if (rc.chunk.workload == w) busy += std::max(0.0, std::min(hi, rc.end) - std::max(lo, rc.start));
  return busy / interval();
}

void Simulation::seed_population(Population& pop, const WorkloadTasks& tasks) {
  if (pop.seeded_at) return;
  pop.estimator.seed(pop.sample_exec, pop.sample_done, tasks.population(pop.type));
  pop.seeded_at = clock_.t;
  pop.chunk_size = chunk_size_for(interval(), pop.sample_exec / static_cast<double>(pop.sample_done));
}

void Simulation::drain(Machine& m, Seconds lo, Seconds hi, std::map<WorkloadId, Seconds>& last_finish) {
  while (!m.queue.empty()) {
    auto& rc = m.queue.front();
    const Seconds overlap = std::max(0.0, std::min(hi, rc.end) - std::max(lo, rc.start));
    busy_seconds_ += overlap;
    m.busy_in_window += overlap;
    Job& job = *std::find_if(jobs_.begin(), jobs_.end(),
                             [&](const Job& j) { return j.spec.id == rc.chunk.workload; });
    auto& tasks = table_.at(rc.chunk.workload);
    Population* pop = population(job, rc.chunk.type);
    while (rc.next < rc.finish.size() && rc.finish[rc.next] <= hi + kEps) {
      const std::size_t idx = rc.chunk.tasks[rc.next];
      tasks.complete(idx);
      const Seconds exec = tasks.at(idx).duration + rc.setup_share;
      ledger_.record_useful(exec);
      if (rc.chunk.type == job.pops.front().type) {
        job.realized_exec += exec;
        ++job.realized_tasks;
      }
      if (rc.chunk.isolated) {
        ++pop->sample_done;
        pop->sample_exec += exec;
        if (pop->sample_done == pop->sample_target) seed_population(*pop, tasks);
      } else {
        pop->estimator.observe(exec, 1);
      }
      auto& lf = last_finish[rc.chunk.workload];
      lf = std::max(lf, rc.finish[rc.next]);
      ++rc.next;
    }
    if (rc.end > hi + kEps) break;
    const Seconds freed = rc.end;
    const WorkloadId w = rc.chunk.workload;
    const TypeId type = rc.chunk.type;
    m.queue.pop_front();
    // A machine that runs dry mid-interval keeps pulling from the same population.
    if (m.queue.empty() && freed < hi - kEps && m.rec.state != InstanceState::terminating &&
        pop->seeded_at && tasks.pending(type) > 0) {
      Chunk next;
      next.workload = w;
      next.type = type;
      next.tasks = tasks.take_pending(type, std::min(pop->chunk_size, tasks.pending(type)));
      place(m, std::move(next), freed);
    }
  }
  if (m.queue.empty()) {
    m.rec.assigned.reset();
    if (m.rec.state == InstanceState::busy) m.rec.state = InstanceState::idle;
  } else {
    m.rec.assigned = ChunkRef{m.queue.front().chunk.workload, 0};
    if (m.rec.state == InstanceState::idle) m.rec.state = InstanceState::busy;
  }
}

void Simulation::progress_chunks() {
  const Seconds hi = now();
  const Seconds lo = hi - interval();
  std::map<WorkloadId, Seconds> last_finish;

  for (auto& m : machines_) {
    if (m.rec.state == InstanceState::launching && m.ready_at <= hi + kEps) {
      m.rec.state = InstanceState::idle;
      m.rec.launch_delay_remaining = 0.0;
    } else if (m.rec.state == InstanceState::launching) {
      m.rec.launch_delay_remaining = m.ready_at - hi;
    }
    drain(m, lo, hi, last_finish);
  }
  std::erase_if(machines_, [](const Machine& m) {
    return m.rec.state == InstanceState::terminating && m.queue.empty();
  });

  for (auto& job : jobs_) {
    if (!active(job)) continue;
    auto& tasks = table_.at(job.spec.id);
    for (auto& pop : job.pops) {
      if (pop.sample_target > 0 && pop.sample_done == pop.sample_target) seed_population(pop, tasks);
    }
    // Gated stage opens once every ungated task is done; the first instance
    // to go idle after that pulls it.
    bool ungated_done = true;
    bool has_blocked = false;
    for (const auto& pop : job.pops) {
      if (tasks.blocked(pop.type) > 0) has_blocked = true;
      else if (tasks.remaining(pop.type) > 0 && pop.sample_target > 0) ungated_done = false;
    }
    if (has_blocked && ungated_done) {
      const Seconds opened = last_finish.count(job.spec.id) ? last_finish[job.spec.id] : hi;
      for (const auto& pop : job.pops) {
        if (tasks.blocked(pop.type) == 0) continue;
        tasks.unblock(pop.type);
        Machine* best = nullptr;
        Seconds best_at = 0.0;
        for (auto& m : machines_) {
          if (m.rec.state == InstanceState::terminating) continue;
          const Seconds at = std::max({opened, m.busy_until, m.ready_at});
          if (!best || at < best_at) {
            best = &m;
            best_at = at;
          }
        }
        if (!best) continue;
        Chunk chunk;
        chunk.workload = job.spec.id;
        chunk.type = pop.type;
        chunk.tasks = tasks.take_pending(pop.type, tasks.pending(pop.type));
        if (chunk.tasks.empty()) continue;
        place(*best, std::move(chunk), opened);
        drain(*best, lo, hi, last_finish);
      }
    }

    if (tasks.all_completed()) {
      job.completion = last_finish.count(job.spec.id) ? last_finish[job.spec.id] : hi;
      job.state.status = WorkloadStatus::completed;
      for (auto& p : job.state.populations) p.remaining = 0;
      job.state.required_cus = 0.0;
      if (*job.completion > job.deadline + kEps) job.violated = true;
    }
  }
}

void Simulation::admit_arrivals() {
  for (auto& job : jobs_) {
    if (job.admitted || job.spec.arrival > now() + kEps) continue;
    job.admitted = true;
    job.state.status = WorkloadStatus::footprinting;
    job.deadline = job.spec.arrival + job.spec.requested_ttc;
    job.state.ttc = job.deadline - now();
    const auto& tasks = table_.at(job.spec.id);
    for (auto& pop : job.pops)
      pop.sample_target = footprint_sample_size(tasks.pending(pop.type), config_.footprint_fraction);
  }
}

void Simulation::update_estimates() {
  for (auto& job : jobs_) {
    if (!active(job)) continue;
    bool all_seeded = true;
    bool all_converged = true;
    for (auto& pop : job.pops) {
      if (pop.sample_target == 0) continue;  // gated stage, never footprinted
      if (!pop.seeded_at) {
        all_seeded = false;
        all_converged = false;
        continue;
      }
      if (*pop.seeded_at != clock_.t) pop.estimator.advance(clock_.t);
      if (!pop.estimator.converged_at()) all_converged = false;
      const Seconds est = pop.estimator.estimate();
      if (est > 0.0) {
        const Seconds planned = static_cast<double>(pop.chunk_size) * est;
        if (planned < 0.5 * interval() || planned > 2.0 * interval())
          pop.chunk_size = chunk_size_for(interval(), est);
      }
    }
    if (job.state.status == WorkloadStatus::footprinting && all_seeded)
      job.state.status = WorkloadStatus::estimating;
    if (job.state.status == WorkloadStatus::estimating && all_converged) {
      refresh_states();
      job.t_init = clock_.t;
      // Plans target the deadline less the dispatch guard: a chunk may wait
      // up to an interval for its instance and then run for about one more.
      job.state.ttc = job.deadline - now() - guard();
      job.state = confirm_ttc(job.state);
      job.deadline = now() + job.state.ttc + guard();
      job.state.ttc += guard();
      job.estimate_at_init = job.pops.front().estimator.estimate();
    }
  }
}

void Simulation::refresh_states() {
  for (auto& job : jobs_) {
    if (!active(job)) continue;
    const auto& tasks = table_.at(job.spec.id);
    for (std::size_t i = 0; i < job.pops.size(); ++i) {
      auto& p = job.state.populations[i];
      p.remaining = tasks.remaining(job.pops[i].type);
      p.cus_estimate = job.pops[i].estimator.estimate();
    }
    job.state.required_cus = required_cus(job.state);
    job.state.ttc = job.deadline - now();
  }
}

double Simulation::compute_rates(std::map<WorkloadId, ComputeUnits>& rates) {
  std::vector<WorkloadState> confirmed;
  double bootstrap = 0.0;
  for (const auto& job : jobs_) {
    if (!active(job)) continue;
    if (job.state.status != WorkloadStatus::confirmed) {
      bootstrap += config_.bootstrap_rate;
      continue;
    }
    WorkloadState s = job.state;
    s.ttc -= guard();
    // While a gated stage waits, the ungated stage must finish inside its
    // share of the confirmed TTC.
    const auto& tasks = table_.at(job.spec.id);
    bool gated_waiting = false;
    for (const auto& pop : job.pops)
      if (tasks.blocked(pop.type) > 0) gated_waiting = true;
    if (gated_waiting && job.spec.split_ttc_fraction < 1.0 && job.t_init) {
      const Seconds confirmed_ttc = job.deadline - job.spec.arrival;
      s.ttc -= (1.0 - job.spec.split_ttc_fraction) * confirmed_ttc;
    }
    confirmed.push_back(s);
  }
  const double n_tot = alive_count();
  const auto alloc = allocate_rates(confirmed, std::max(0.0, n_tot - bootstrap),
                                    config_.aimd.alpha, config_.aimd.beta);
  for (std::size_t i = 0; i < confirmed.size(); ++i) {
    double r = alloc.rates[i];
    if (r <= kEps && table_.at(confirmed[i].id).pending_total() > 0) r = config_.bootstrap_rate;
    rates[confirmed[i].id] = r;
  }
  for (auto& job : jobs_)
    if (active(job) && rates.count(job.spec.id)) job.state.service_rate = rates[job.spec.id];
  return alloc.n_star + bootstrap;
}

double Simulation::utilization() {
  const double cpu_share = 1.0 / (1.0 + config_.transport_overhead);
  double sum = 0.0;
  int running = 0;
  for (auto& m : machines_) {
    const Seconds from = std::max(m.window_start, m.ready_at);
    if (m.ready_at <= now() + kEps && now() - from > kEps) {
      sum += std::min(1.0, m.busy_in_window / (now() - from)) * cpu_share;
      ++running;
    }
    m.busy_in_window = 0.0;
    m.window_start = now();
  }
  return running > 0 ? sum / running : 0.0;
}

void Simulation::scale_fleet(double n_star) {
  FleetObservation obs;
  obs.elapsed = now();
  obs.n_tot = alive_count();
  obs.n_star = n_star;
  if (is_utilization_based(config_.controller) && controller_.acts_at(now()))
    obs.utilization = utilization();

  std::vector<InstanceRecord> fleet;
  fleet.reserve(machines_.size());
  for (const auto& m : machines_) fleet.push_back(m.rec);
  const auto decision = controller_.decide(obs, fleet);

  // A launching instance may already hold queued chunks; it drains them first.
  for (InstanceId id : decision.terminations.immediate) {
    if (auto* m = machine(id); m && !m->queue.empty()) m->rec.state = InstanceState::terminating;
    else std::erase_if(machines_, [id](const Machine& m) { return m.rec.id == id; });
  }
  for (InstanceId id : decision.terminations.after_chunk)
    if (auto* m = machine(id)) m->rec.state = InstanceState::terminating;
  for (std::size_t i = 0; i < decision.launches; ++i)
    launch(now(), config_.launch_delay <= 0.0);
}

void Simulation::place(Machine& m, Chunk chunk, Seconds not_before) {
  const auto& tasks = table_.at(chunk.workload);
  RunningChunk rc;
  rc.start = std::max({not_before, m.busy_until, m.ready_at});
  const Seconds setup = tasks.deadband(chunk.type);
  rc.setup_share = chunk.isolated ? setup : setup / static_cast<double>(chunk.tasks.size());
  Seconds clock = rc.start + (chunk.isolated ? 0.0 : setup);
  for (std::size_t idx : chunk.tasks) {
    const Seconds started = clock;
    clock += tasks.at(idx).duration + (chunk.isolated ? setup : 0.0);
    rc.finish.push_back(clock);
    if (config_.record_events)
      report_.events.push_back({chunk.workload, idx, chunk.type, m.rec.id, started, clock});
  }
  rc.end = clock;
  rc.chunk = std::move(chunk);
  m.busy_until = rc.end;
  if (m.rec.state == InstanceState::idle) m.rec.state = InstanceState::busy;
  if (!m.rec.assigned) m.rec.assigned = ChunkRef{rc.chunk.workload, 0};
  m.queue.push_back(std::move(rc));
}

void Simulation::assign_work(const std::map<WorkloadId, ComputeUnits>& rates) {
  auto free_machines = [&] {
    std::vector<Machine*> out;
    for (auto& m : machines_)
      if (free_fraction(m) > kEps) out.push_back(&m);
    std::stable_sort(out.begin(), out.end(), [&](const Machine* a, const Machine* b) {
      const double fa = free_fraction(*a), fb = free_fraction(*b);
      if (fa != fb) return fa > fb;
      return a->rec.id < b->rec.id;
    });
    return out;
  };

  // Footprint samples first, spread over up to N_wmax instances.
  for (auto& job : jobs_) {
    if (!active(job) || job.state.status != WorkloadStatus::footprinting) continue;
    auto& tasks = table_.at(job.spec.id);
    for (auto& pop : job.pops) {
      std::int64_t left = pop.sample_target - pop.sample_assigned;
      if (left <= 0) continue;
      auto pool = free_machines();
      const auto k = std::min<std::int64_t>(
          {left, static_cast<std::int64_t>(pool.size()),
           static_cast<std::int64_t>(std::llround(config_.per_workload_cap))});
      for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t n = (left + (k - i) - 1) / (k - i);
        Chunk c;
        c.workload = job.spec.id;
        c.type = pop.type;
        c.isolated = true;
        c.tasks = tasks.take_pending(pop.type, n);
        pop.sample_assigned += static_cast<std::int64_t>(c.tasks.size());
        left -= static_cast<std::int64_t>(c.tasks.size());
        place(*pool[static_cast<std::size_t>(i)], std::move(c));
      }
    }
  }

  if (is_utilization_based(config_.controller)) {
    assign_greedy();
    return;
  }

  std::vector<ShareRequest> requests;
  for (const auto& job : jobs_) {
    if (!active(job)) continue;
    const auto status = job.state.status;
    if (status != WorkloadStatus::estimating && status != WorkloadStatus::confirmed) continue;
    ShareRequest req;
    req.workload = job.spec.id;
    req.rate = status == WorkloadStatus::confirmed ? rates.at(job.spec.id) : config_.bootstrap_rate;
    req.in_flight = in_flight(job.spec.id);
    const auto& tasks = table_.at(job.spec.id);
    for (const auto& pop : job.pops)
      if (tasks.pending(pop.type) > 0)
        req.types.push_back({pop.type, pop.estimator.estimate(), pop.chunk_size});
    if (!req.types.empty()) requests.push_back(std::move(req));
  }
  std::vector<FreeInstance> free;
  for (auto* m : free_machines()) free.push_back({m->rec.id, free_fraction(*m)});
  for (auto& a : assign_chunks(requests, free, table_, interval()))
    if (!a.chunk.tasks.empty()) place(*machine(a.instance), std::move(a.chunk));
}

void Simulation::assign_greedy() {
  // Utilization autoscaling has no rates: every free instance pulls the next
  // chunk, cycling over workloads in id order.
  std::vector<Job*> ready;
  for (auto& job : jobs_)
    if (active(job) && (job.state.status == WorkloadStatus::estimating ||
                        job.state.status == WorkloadStatus::confirmed))
      ready.push_back(&job);
  if (ready.empty()) return;
  std::vector<Machine*> pool;
  for (auto& m : machines_)
    if (free_fraction(m) > kEps) pool.push_back(&m);
  std::stable_sort(pool.begin(), pool.end(), [](const Machine* a, const Machine* b) {
    return a->rec.id < b->rec.id;
  });
  // Instances currently working for each workload, held to N_wmax.
  std::map<WorkloadId, int> holders;
  for (const auto& m : machines_) {
    std::set<WorkloadId> seen;
    for (const auto& rc : m.queue)
      if (rc.end > now() + kEps) seen.insert(rc.chunk.workload);
    for (WorkloadId w : seen) ++holders[w];
  }
  const int cap = static_cast<int>(std::llround(config_.per_workload_cap));
  for (auto* m : pool) {
    for (std::size_t tries = 0; tries < ready.size(); ++tries) {
      Job& job = *ready[rr_cursor_++ % ready.size()];
      if (holders[job.spec.id] >= cap) continue;
      auto& tasks = table_.at(job.spec.id);
      Population* best = nullptr;
      for (auto& pop : job.pops)
        if (tasks.pending(pop.type) > 0 && (!best || tasks.pending(pop.type) > tasks.pending(best->type)))
          best = &pop;
      if (!best) continue;
      const auto n = std::max<std::int64_t>(
          1, std::llround(free_fraction(*m) * static_cast<double>(best->chunk_size)));
      Chunk c;
      c.workload = job.spec.id;
      c.type = best->type;
      c.tasks = tasks.take_pending(best->type, n);
      place(*m, std::move(c));
      ++holders[job.spec.id];
      break;
    }
  }
}

void Simulation::advance_billing() {
  for (auto& m : machines_) {
    m.rec.billing_remaining -= interval();
    while (m.rec.billing_remaining < -kEps) {
      ledger_.charge(m.rec.cus_per_instance);
      m.rec.billing_remaining += config_.billing_period;
    }
    m.rec.billing_remaining = std::max(0.0, m.rec.billing_remaining);
  }
}

void Simulation::append_row(double n_star) {
  IntervalRow row;
  row.t = clock_.t;
  row.elapsed = now();
  row.n_tot = alive_count();
  row.n_star = n_star;
  row.cum_cost = ledger_.total_billed();
  row.lb_cost = lower_bound_cost(ledger_.useful_cus(), config_.billing_period,
                                 config_.price_per_instance_hour);
  for (const auto& job : jobs_) {
    if (!active(job)) continue;
    ++row.active_workloads;
    row.workloads.push_back({job.spec.id, job.state.required_cus, job.state.ttc});
  }
  report_.rows.push_back(std::move(row));
}

bool Simulation::step() {
  if (done_) return false;
  if (clock_.t > 0) progress_chunks();
  admit_arrivals();
  if (finished() || now() >= horizon_ - kEps) {
    refresh_states();
    append_row(0.0);
    finalize();
    done_ = true;
    return false;
  }
  update_estimates();
  refresh_states();
  std::map<WorkloadId, ComputeUnits> rates;
  const double n_star = compute_rates(rates);
  scale_fleet(n_star);
  assign_work(rates);
  advance_billing();
  append_row(n_star);
  clock_.tick();
  return true;
}

SimReport Simulation::run() {
  while (step()) {
  }
  return report_;
}

void Simulation::finalize() {
  machines_.clear();
  report_.final_cost = ledger_.total_billed();
  report_.charges = ledger_.charges();
  report_.useful_cus = ledger_.useful_cus();
  report_.busy_seconds = busy_seconds_;
  report_.lb_cost = lower_bound_cost(report_);
  report_.makespan = 0.0;
  for (auto& job : jobs_) {
    WorkloadOutcome o;
    o.id = job.spec.id;
    o.family = job.spec.family;
    o.tasks = static_cast<std::int64_t>(job.spec.tasks.size());
    o.arrival = job.spec.arrival;
    o.requested_ttc = job.spec.requested_ttc;
    o.confirmed = job.t_init.has_value();
    o.confirmed_ttc = job.admitted ? job.deadline - job.spec.arrival : job.spec.requested_ttc;
    o.completion = job.completion;
    // The reference is the realized per-item cost, setup time included.
    if (job.realized_tasks > 0)
      job.true_cus = job.realized_exec / static_cast<double>(job.realized_tasks);
    o.true_cus = job.true_cus;
    if (job.t_init) {
      o.time_to_estimate = static_cast<Seconds>(*job.t_init * clock_.interval) - job.spec.arrival;
      o.estimate_at_init = job.estimate_at_init;
      if (job.true_cus > 0.0)
        o.mae_pct = 100.0 * std::abs(job.estimate_at_init - job.true_cus) / job.true_cus;
    }
    if (!job.completion) {
      job.violated = true;
      report_.incomplete.push_back(job.spec.id);
    } else {
      report_.makespan = std::max(report_.makespan, *job.completion);
    }
    o.violated = job.violated;
    if (job.violated) report_.violations.push_back(job.spec.id);
    report_.workloads.push_back(o);
  }
}

std::vector<InstanceRecord> Simulation::fleet() const {
  std::vector<InstanceRecord> out;
  for (const auto& m : machines_) out.push_back(m.rec);
  return out;
}

std::vector<WorkloadState> Simulation::workload_states() const {
  std::vector<WorkloadState> out;
  for (const auto& job : jobs_) out.push_back(job.state);
  return out;
}

}  // namespace spotscale
