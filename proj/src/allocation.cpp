#include "spotscale/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spotscale {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::optimal: return "optimal";
    case Regime::downscaled: return "downscaled";
    case Regime::upscaled: return "upscaled";
  }
  return "unknown";
}

ComputeUnits optimal_rate(const WorkloadState& w) {
  if (w.required_cus <= 0.0) return 0.0;
  if (w.ttc <= 0.0) return w.per_workload_cap;
  return w.required_cus / w.ttc;
}

WorkloadState confirm_ttc(WorkloadState w) {
  const Seconds r = w.required_cus;
  if (r > 0.0 && (w.ttc <= 0.0 || r / w.ttc > w.per_workload_cap))
    w.ttc = r / w.per_workload_cap;
  w.status = WorkloadStatus::confirmed;
  return w;
}

RateAllocation allocate_rates(std::span<const WorkloadState> workloads, ComputeUnits n_tot,
                              double alpha, double beta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");

  RateAllocation out;
  out.unclamped.reserve(workloads.size());
  for (const auto& w : workloads) out.unclamped.push_back(optimal_rate(w));
  out.n_star = std::accumulate(out.unclamped.begin(), out.unclamped.end(), 0.0);

  if (out.n_star > 0.0) {
    double factor = 1.0;
    if (out.n_star > n_tot + alpha) {
      out.regime = Regime::downscaled;
      factor = (n_tot + alpha) / out.n_star;
    } else if (out.n_star < beta * n_tot) {
      out.regime = Regime::upscaled;
      factor = beta * n_tot / out.n_star;
    }
    for (auto& s : out.unclamped) s *= factor;
  }

  // Cap, then hand the clipped excess to the unclamped workloads once.
  out.rates = out.unclamped;
  std::vector<bool> clamped(workloads.size(), false);
  double excess = 0.0;
  double open = 0.0;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    const double cap = workloads[i].per_workload_cap;
    if (out.rates[i] > cap) {
      excess += out.rates[i] - cap;
      out.rates[i] = cap;
      clamped[i] = true;
    } else {
      open += out.rates[i];
    }
  }
  if (excess > 0.0 && open > 0.0) {
    for (std::size_t i = 0; i < workloads.size(); ++i) {
      if (clamped[i]) continue;
      out.rates[i] = std::min(workloads[i].per_workload_cap,
                              out.rates[i] + excess * out.rates[i] / open);
    }
  }
  return out;
}

// ---- tracker ---------------------------------------------------------------

WorkloadTasks::WorkloadTasks(WorkloadId id, std::vector<TaskRecord> tasks,
                             std::map<TypeId, Seconds> deadband)
    : id_(id), tasks_(std::move(tasks)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    auto& q = queues_[tasks_[i].type];
    q.order.push_back(i);
    if (tasks_[i].status == TaskStatus::blocked) ++q.blocked;
    if (tasks_[i].status != TaskStatus::pending && tasks_[i].status != TaskStatus::blocked)
      throw std::invalid_argument("new task table must start pending or blocked");
  }
  for (const auto& [type, seconds] : deadband) {
    if (seconds < 0.0) throw std::invalid_argument("deadband must be non-negative");
    auto it = queues_.find(type);
    if (it != queues_.end()) it->second.deadband = seconds;
  }
}

const WorkloadTasks::Queue* WorkloadTasks::queue(TypeId type) const {
  auto it = queues_.find(type);
  return it == queues_.end() ? nullptr : &it->second;
}

std::vector<TypeId> WorkloadTasks::types() const {
  std::vector<TypeId> out;
  for (const auto& [type, q] : queues_) out.push_back(type);
  return out;
}

Seconds WorkloadTasks::deadband(TypeId type) const {
  const auto* q = queue(type);
  return q ? q->deadband : 0.0;
}

std::int64_t WorkloadTasks::population(TypeId type) const {
  const auto* q = queue(type);
  return q ? static_cast<std::int64_t>(q->order.size()) : 0;
}

std::int64_t WorkloadTasks::pending(TypeId type) const {
  const auto* q = queue(type);
  if (!q) return 0;
  return static_cast<std::int64_t>(q->order.size() - q->cursor) - q->blocked;
}

std::int64_t WorkloadTasks::pending_total() const {
  std::int64_t n = 0;
  for (const auto& [type, q] : queues_) n += pending(type);
  return n;
}

std::int64_t WorkloadTasks::remaining(TypeId type) const {
  const auto* q = queue(type);
  return q ? static_cast<std::int64_t>(q->order.size()) - q->completed : 0;
}

std::int64_t WorkloadTasks::completed(TypeId type) const {
  const auto* q = queue(type);
  return q ? q->completed : 0;
}

std::int64_t WorkloadTasks::blocked(TypeId type) const {
  const auto* q = queue(type);
  return q ? q->blocked : 0;
}

std::vector<std::size_t> WorkloadTasks::peek_pending(TypeId type, std::int64_t n) const {
  std::vector<std::size_t> out;
  const auto* q = queue(type);
  if (!q || q->blocked > 0) return out;
  for (std::size_t i = q->cursor; i < q->order.size() && static_cast<std::int64_t>(out.size()) < n; ++i)
    out.push_back(q->order[i]);
  return out;
}

std::vector<std::size_t> WorkloadTasks::take_pending(TypeId type, std::int64_t n) {
  auto out = peek_pending(type, n);
  auto& q = queues_.at(type);
  for (std::size_t idx : out) tasks_[idx].status = TaskStatus::processing;
  q.cursor += out.size();
  return out;
}

void WorkloadTasks::complete(std::size_t task) {
  auto& rec = tasks_.at(task);
  if (rec.status != TaskStatus::processing)
    throw std::logic_error("completing a task that is not processing");
  rec.status = TaskStatus::completed;
  ++queues_.at(rec.type).completed;
  ++completed_total_;
}

void WorkloadTasks::unblock(TypeId type) {
  auto it = queues_.find(type);
  if (it == queues_.end()) return;
  for (std::size_t idx : it->second.order)
    if (tasks_[idx].status == TaskStatus::blocked) tasks_[idx].status = TaskStatus::pending;
  it->second.blocked = 0;
}

Seconds chunk_duration(const Chunk& c, const WorkloadTasks& tasks) {
  const Seconds setup = tasks.deadband(c.type);
  Seconds d = c.isolated ? 0.0 : setup;
  for (std::size_t idx : c.tasks) d += tasks.at(idx).duration + (c.isolated ? setup : 0.0);
  return d;
}

std::int64_t footprint_sample_size(std::int64_t population, double fraction) {
  if (population <= 0) return 0;
  const auto n = static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(population)));
  return std::clamp<std::int64_t>(n, 1, population);
}

std::int64_t chunk_size_for(Seconds interval, Seconds per_item_cus) {
  if (!(per_item_cus > 0.0)) return 1;
  return std::max<std::int64_t>(1, std::llround(interval / per_item_cus));
}

std::vector<TypeFootprint> footprint(const WorkloadTasks& w, double fraction, Seconds interval) {
  if (w.size() == 0) throw std::invalid_argument("cannot footprint an empty workload");
  std::vector<TypeFootprint> out;
  for (TypeId type : w.types()) {
    const auto sample = w.peek_pending(type, footprint_sample_size(w.pending(type), fraction));
    if (sample.empty()) continue;
    TypeFootprint fp;
    fp.type = type;
    fp.sampled = static_cast<std::int64_t>(sample.size());
    for (std::size_t idx : sample) fp.exec_seconds += w.at(idx).duration + w.deadband(type);
    fp.mean_cus = fp.exec_seconds / static_cast<double>(fp.sampled);
    fp.chunk_size = chunk_size_for(interval, fp.mean_cus);
    out.push_back(fp);
  }
  return out;
}

namespace {

struct Grant {
  InstanceId instance;
  std::size_t request;
  double share;
};

}  // namespace

std::vector<ChunkAssignment> assign_chunks(std::span<const ShareRequest> requests,
                                           std::span<const FreeInstance> free,
                                           TaskTable& table, Seconds interval) {
  constexpr double kEps = 1e-9;

  std::vector<double> need(requests.size(), 0.0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    auto it = table.find(req.workload);
    if (it == table.end() || it->second.pending_total() == 0) continue;
    double n = std::max(0.0, req.rate - req.in_flight);
    // Never ask for more instance-time than the pending work can fill.
    double pending_work = 0.0;
    bool known = true;
    for (const auto& tc : req.types) {
      if (tc.per_item_estimate <= 0.0) known = false;
      pending_work += static_cast<double>(it->second.pending(tc.type)) * tc.per_item_estimate;
    }
    if (known && !req.types.empty()) n = std::min(n, std::max(pending_work / interval, kEps));
    if (n <= kEps) continue;
    need[i] = n;
    order.push_back(i);
  }
  auto by_deficit = [&](std::size_t a, std::size_t b) {
    if (need[a] != need[b]) return need[a] > need[b];
    return requests[a].workload < requests[b].workload;
  };
  std::stable_sort(order.begin(), order.end(), by_deficit);

  std::vector<FreeInstance> pool(free.begin(), free.end());
  std::erase_if(pool, [](const FreeInstance& f) { return f.free_fraction <= kEps; });
  std::stable_sort(pool.begin(), pool.end(), [](const FreeInstance& a, const FreeInstance& b) {
    if (a.free_fraction != b.free_fraction) return a.free_fraction > b.free_fraction;
    return a.id < b.id;
  });

  std::vector<Grant> grants;
  std::size_t next = 0;
  // Whole instances.
  for (std::size_t i : order) {
    auto whole = static_cast<std::int64_t>(std::floor(need[i] + kEps));
    while (whole-- > 0 && next < pool.size()) {
      grants.push_back({pool[next].id, i, pool[next].free_fraction});
      need[i] = std::max(0.0, need[i] - pool[next].free_fraction);
      ++next;
    }
  }
  // Fractional remainders, time-sliced.
  std::stable_sort(order.begin(), order.end(), by_deficit);
  double capacity = next < pool.size() ? pool[next].free_fraction : 0.0;
  for (std::size_t i : order) {
    double amount = need[i];
    while (amount > kEps && next < pool.size()) {
      const double g = std::min(amount, capacity);
      grants.push_back({pool[next].id, i, g});
      amount -= g;
      capacity -= g;
      if (capacity <= kEps) {
        ++next;
        capacity = next < pool.size() ? pool[next].free_fraction : 0.0;
      }
    }
  }

  std::vector<ChunkAssignment> out;
  for (const auto& g : grants) {
    const auto& req = requests[g.request];
    auto& tasks = table.at(req.workload);
    const TypeChunking* best = nullptr;
    for (const auto& tc : req.types)
      if (tasks.pending(tc.type) > 0 && (!best || tasks.pending(tc.type) > tasks.pending(best->type)))
        best = &tc;
    if (!best) continue;
    const auto n = std::max<std::int64_t>(
        1, std::llround(g.share * static_cast<double>(best->chunk_size)));
    ChunkAssignment a;
    a.instance = g.instance;
    a.share = g.share;
    a.chunk.workload = req.workload;
    a.chunk.type = best->type;
    a.chunk.tasks = tasks.take_pending(best->type, n);
    a.chunk.estimated_duration = static_cast<double>(a.chunk.tasks.size()) * best->per_item_estimate;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace spotscale
