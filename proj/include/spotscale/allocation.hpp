#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "spotscale/domain.hpp"

namespace spotscale {

enum class Regime { optimal, downscaled, upscaled };

std::string_view to_string(Regime r);

struct RateAllocation {
  std::vector<ComputeUnits> unclamped;  // after regime scaling, before the cap
  std::vector<ComputeUnits> rates;      // what the tracker hands out
  Regime regime = Regime::optimal;
  ComputeUnits n_star = 0.0;
};

// s* = r / d. A workload already past its deadline with work left gets its cap.
ComputeUnits optimal_rate(const WorkloadState& w);

// Confirms the remaining TTC, stretching it when the cap cannot meet it.
WorkloadState confirm_ttc(WorkloadState w);

// Proportional-fair rates for confirmed workloads given the current fleet.
// Uses each workload's `required_cus` and `ttc` fields.
RateAllocation allocate_rates(std::span<const WorkloadState> workloads, ComputeUnits n_tot,
                              double alpha, double beta);

// ---- tracker ---------------------------------------------------------------

enum class TaskStatus { blocked, pending, processing, completed };

struct TaskRecord {
  TypeId type = 0;
  Seconds duration = 0.0;  // effective execution time, transport included
  TaskStatus status = TaskStatus::pending;
};

// Task states of one workload, in input order. Tasks only move forward
// (blocked -> pending -> processing -> completed).
class WorkloadTasks {
 public:
  WorkloadTasks() = default;
  WorkloadTasks(WorkloadId id, std::vector<TaskRecord> tasks,
                std::map<TypeId, Seconds> deadband = {});

  WorkloadId id() const { return id_; }
  std::vector<TypeId> types() const;
  std::size_t size() const { return tasks_.size(); }
  const TaskRecord& at(std::size_t i) const { return tasks_.at(i); }
  Seconds deadband(TypeId type) const;

  std::int64_t population(TypeId type) const;
  std::int64_t pending(TypeId type) const;
  std::int64_t pending_total() const;
  std::int64_t remaining(TypeId type) const;  // not yet completed
  std::int64_t completed(TypeId type) const;
  std::int64_t blocked(TypeId type) const;
  bool all_completed() const { return completed_total_ == static_cast<std::int64_t>(tasks_.size()); }

  // Peeks at the next `n` pending tasks of `type` without claiming them.
  std::vector<std::size_t> peek_pending(TypeId type, std::int64_t n) const;
  // Claims up to `n` pending tasks of `type`, marking them processing.
  std::vector<std::size_t> take_pending(TypeId type, std::int64_t n);
  void complete(std::size_t task);
  // Releases every blocked task of `type` into pending.
  void unblock(TypeId type);

 private:
  struct Queue {
    std::vector<std::size_t> order;
    std::size_t cursor = 0;  // first task not yet claimed
    std::int64_t completed = 0;
    std::int64_t blocked = 0;
    Seconds deadband = 0.0;
  };
  const Queue* queue(TypeId type) const;

  WorkloadId id_ = 0;
  std::vector<TaskRecord> tasks_;
  std::map<TypeId, Queue> queues_;
  std::int64_t completed_total_ = 0;
};

using TaskTable = std::map<WorkloadId, WorkloadTasks>;

struct Chunk {
  WorkloadId workload = 0;
  TypeId type = 0;
  std::vector<std::size_t> tasks;
  Seconds estimated_duration = 0.0;
  bool isolated = false;  // every task pays its own setup (footprint runs)
};

// Wall-clock seconds a chunk occupies its instance.
Seconds chunk_duration(const Chunk& c, const WorkloadTasks& tasks);

struct TypeFootprint {
  TypeId type = 0;
  std::int64_t sampled = 0;
  Seconds exec_seconds = 0.0;
  Seconds mean_cus = 0.0;
  std::int64_t chunk_size = 1;
};

std::int64_t footprint_sample_size(std::int64_t population, double fraction);
std::int64_t chunk_size_for(Seconds interval, Seconds per_item_cus);

// Runs the footprint sample of every type in isolation (one setup per task)
// and derives b~[0] and the chunk size. Does not mutate task states.
std::vector<TypeFootprint> footprint(const WorkloadTasks& w, double fraction, Seconds interval);

struct TypeChunking {
  TypeId type = 0;
  Seconds per_item_estimate = 0.0;
  std::int64_t chunk_size = 1;
};

struct ShareRequest {
  WorkloadId workload = 0;
  ComputeUnits rate = 0.0;
  ComputeUnits in_flight = 0.0;  // CUs already busy on this workload next interval
  std::vector<TypeChunking> types;
};

struct FreeInstance {
  InstanceId id = 0;
  double free_fraction = 1.0;  // share of the coming interval it can take work
};

struct ChunkAssignment {
  InstanceId instance = 0;
  double share = 0.0;
  Chunk chunk;
};

// Hands pending tasks to free instances in proportion to the service rates.
// Whole CUs go first by descending deficit; fractional remainders share
// instances by largest remainder.
std::vector<ChunkAssignment> assign_chunks(std::span<const ShareRequest> requests,
                                           std::span<const FreeInstance> free,
                                           TaskTable& table, Seconds interval);

}  // namespace spotscale
