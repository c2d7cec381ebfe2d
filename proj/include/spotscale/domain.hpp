#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spotscale {

using Seconds = double;
using ComputeUnits = double;
using Instant = std::int64_t;
using WorkloadId = int;
using TypeId = int;
using InstanceId = int;

// Discrete monitoring time. `t` counts monitoring instants, `interval` is the
// fixed number of seconds between two instants.
struct SimClock {
  Instant t = 0;
  std::int64_t interval = 300;

  Seconds elapsed() const { return static_cast<Seconds>(t * interval); }
  void tick() { ++t; }
};

// One media type inside a workload: items still to process and the current
// per-item compute-unit-second estimate.
struct MediaTypePopulation {
  TypeId type_id = 0;
  std::int64_t remaining = 0;
  Seconds cus_estimate = 0.0;
};

enum class WorkloadStatus { footprinting, estimating, confirmed, completed, cancelled };

std::string_view to_string(WorkloadStatus s);

struct WorkloadState {
  WorkloadId id = 0;
  std::vector<MediaTypePopulation> populations;
  Seconds ttc = 0.0;            // remaining seconds to the confirmed deadline
  Seconds requested_ttc = 0.0;
  ComputeUnits service_rate = 0.0;
  Seconds required_cus = 0.0;
  WorkloadStatus status = WorkloadStatus::footprinting;
  ComputeUnits per_workload_cap = 10.0;
};

enum class InstanceState { launching, idle, busy, terminating };

std::string_view to_string(InstanceState s);

struct ChunkRef {
  WorkloadId workload = 0;
  int chunk = 0;
};

struct InstanceRecord {
  InstanceId id = 0;
  int type_index = 0;
  int cus_per_instance = 1;
  Seconds billing_remaining = 0.0;
  InstanceState state = InstanceState::idle;
  std::optional<ChunkRef> assigned;
  Seconds launch_delay_remaining = 0.0;
};

// Billing accumulator. Every charge is one full billing period of one CU.
class CostLedger {
 public:
  explicit CostLedger(double price_per_instance_hour = 0.0081)
      : price_(price_per_instance_hour) {}

  void charge(int cus = 1) {
    charges_ += cus;
    total_billed_ = static_cast<double>(charges_) * price_;
  }
  void record_useful(Seconds cus) { useful_cus_ += cus; }

  double price_per_instance_hour() const { return price_; }
  double total_billed() const { return total_billed_; }
  std::int64_t charges() const { return charges_; }
  Seconds useful_cus() const { return useful_cus_; }

 private:
  double price_;
  double total_billed_ = 0.0;
  std::int64_t charges_ = 0;
  Seconds useful_cus_ = 0.0;
};

// Sum of p_i over the reserved fleet.
ComputeUnits total_cus(std::span<const InstanceRecord> fleet);

// Sum of p_i * a_ij: compute-unit seconds already paid for and not yet used.
Seconds total_billed_cus(std::span<const InstanceRecord> fleet);

// r_w = sum_k m_wk * b_wk.
Seconds required_cus(const WorkloadState& w);

}  // namespace spotscale
