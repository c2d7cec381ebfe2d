#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spotscale/allocation.hpp"
#include "spotscale/control.hpp"
#include "spotscale/domain.hpp"
#include "spotscale/estimation.hpp"
#include "spotscale/workloads.hpp"

namespace spotscale {

struct SimConfig {
  std::int64_t interval = 300;
  Seconds billing_period = 3600.0;
  Seconds launch_delay = 120.0;
  double price_per_instance_hour = 0.0081;
  double transport_overhead = 0.27;
  std::uint64_t seed = 7;
  ControllerKind controller = ControllerKind::aimd;
  EstimatorKind estimator = EstimatorKind::kalman;
  AimdParams aimd;
  EstimatorParams estimation;
  ComputeUnits per_workload_cap = 10.0;
  double footprint_fraction = 0.05;
  ComputeUnits bootstrap_rate = 1.0;
  int initial_fleet = -1;      // negative: start at n_min
  double deadline_guard = 2.0;  // monitoring intervals reserved before each deadline
  Seconds horizon = 0.0;       // 0: ten times the longest TTC after the last arrival
  Seconds as_period = 300.0;
  double as_threshold = 0.20;
  bool record_events = false;

  void validate() const;
  int resolved_initial_fleet() const;
};

struct WorkloadTrace {
  WorkloadId id = 0;
  Seconds required_cus = 0.0;
  Seconds ttc = 0.0;
};

struct IntervalRow {
  Instant t = 0;
  Seconds elapsed = 0.0;
  int n_tot = 0;
  double n_star = 0.0;
  double cum_cost = 0.0;
  double lb_cost = 0.0;
  int active_workloads = 0;
  std::vector<WorkloadTrace> workloads;
};

struct WorkloadOutcome {
  WorkloadId id = 0;
  Family family = Family::face_detection;
  std::int64_t tasks = 0;
  Seconds arrival = 0.0;
  Seconds requested_ttc = 0.0;
  Seconds confirmed_ttc = 0.0;  // measured from arrival; equals requested until confirmed
  bool confirmed = false;
  std::optional<Seconds> completion;        // absolute seconds
  std::optional<Seconds> time_to_estimate;  // t_init relative to arrival
  Seconds estimate_at_init = 0.0;
  Seconds true_cus = 0.0;
  double mae_pct = 0.0;
  bool violated = false;
};

struct TaskEvent {
  WorkloadId workload = 0;
  std::size_t task = 0;
  TypeId type = 0;
  InstanceId instance = 0;
  Seconds start = 0.0;
  Seconds finish = 0.0;
};

struct SimReport {
  std::string scenario;
  ControllerKind controller = ControllerKind::aimd;
  EstimatorKind estimator = EstimatorKind::kalman;
  Seconds billing_period = 3600.0;
  double price_per_instance_hour = 0.0081;
  std::vector<IntervalRow> rows;
  std::vector<WorkloadOutcome> workloads;
  std::vector<WorkloadId> violations;
  std::vector<WorkloadId> incomplete;
  std::vector<TaskEvent> events;
  double final_cost = 0.0;
  double lb_cost = 0.0;
  std::int64_t charges = 0;
  int max_fleet = 0;
  Seconds useful_cus = 0.0;
  Seconds busy_seconds = 0.0;
  Seconds makespan = 0.0;
};

// ceil(useful / billing period) instance-hours at the given price.
double lower_bound_cost(Seconds useful_cus, Seconds billing_period, double price);
double lower_bound_cost(const SimReport& report);

// Discrete-time engine. Each call to step() processes one monitoring instant:
// progress chunks, update estimators, compute rates, scale the fleet, hand out
// chunks, advance billing, append a report row.
class Simulation {
 public:
  Simulation(SimConfig config, Scenario scenario);

  // Returns false once every workload has completed or the horizon is hit.
  bool step();
  SimReport run();

  const SimClock& clock() const { return clock_; }
  const CostLedger& ledger() const { return ledger_; }
  const SimReport& report() const { return report_; }
  std::vector<InstanceRecord> fleet() const;
  std::vector<WorkloadState> workload_states() const;
  const TaskTable& tasks() const { return table_; }
  Seconds horizon() const { return horizon_; }

 private:
  struct RunningChunk {
    Chunk chunk;
    Seconds start = 0.0;
    Seconds end = 0.0;
    std::vector<Seconds> finish;  // absolute finish time per task
    Seconds setup_share = 0.0;    // setup seconds attributed to each task
    std::size_t next = 0;
  };

  struct Machine {
    InstanceRecord rec;
    Seconds ready_at = 0.0;
    Seconds busy_until = 0.0;
    Seconds busy_in_window = 0.0;  // for the utilization autoscaler
    Seconds window_start = 0.0;
    std::deque<RunningChunk> queue;
  };

  struct Population {
    TypeId type = 0;
    CusEstimator estimator;
    std::int64_t chunk_size = 1;
    std::int64_t sample_target = 0;
    std::int64_t sample_assigned = 0;
    std::int64_t sample_done = 0;
    Seconds sample_exec = 0.0;
    std::optional<Instant> seeded_at;
  };

  struct Job {
    WorkloadSpec spec;
    WorkloadState state;
    std::vector<Population> pops;
    bool admitted = false;
    Seconds deadline = 0.0;  // absolute
    std::optional<Instant> t_init;
    std::optional<Seconds> completion;
    bool violated = false;
    Seconds estimate_at_init = 0.0;
    Seconds true_cus = 0.0;
    Seconds realized_exec = 0.0;
    std::int64_t realized_tasks = 0;
  };

  Seconds now() const { return clock_.elapsed(); }
  Seconds interval() const { return static_cast<Seconds>(clock_.interval); }
  Seconds guard() const { return config_.deadline_guard * interval(); }
  bool finished() const;
  bool active(const Job& j) const;

  void launch(Seconds at, bool ready_now);
  void progress_chunks();
  void admit_arrivals();
  void update_estimates();
  void refresh_states();
  double compute_rates(std::map<WorkloadId, ComputeUnits>& rates);
  void scale_fleet(double n_star);
  void assign_work(const std::map<WorkloadId, ComputeUnits>& rates);
  void assign_greedy();
  void place(Machine& m, Chunk chunk) { place(m, std::move(chunk), now()); }
  void place(Machine& m, Chunk chunk, Seconds not_before);
  void seed_population(Population& pop, const WorkloadTasks& tasks);
  void drain(Machine& m, Seconds lo, Seconds hi, std::map<WorkloadId, Seconds>& last_finish);
  void advance_billing();
  void append_row(double n_star);
  void finalize();

  Population* population(Job& j, TypeId type);
  Machine* machine(InstanceId id);
  double free_fraction(const Machine& m) const;
  ComputeUnits in_flight(WorkloadId w) const;
  int alive_count() const;
  double utilization();

  SimConfig config_;
  Scenario scenario_;
  SimClock clock_;
  CostLedger ledger_;
  FleetController controller_;
  std::vector<Job> jobs_;
  TaskTable table_;
  std::vector<Machine> machines_;
  InstanceId next_instance_ = 0;
  Seconds horizon_ = 0.0;
  Seconds busy_seconds_ = 0.0;
  std::size_t rr_cursor_ = 0;
  bool done_ = false;
  SimReport report_;
};

}  // namespace spotscale
