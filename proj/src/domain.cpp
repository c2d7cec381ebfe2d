#include "spotscale/domain.hpp"

namespace spotscale {

std::string_view to_string(WorkloadStatus s) {
  switch (s) {
    case WorkloadStatus::footprinting: return "footprinting";
    case WorkloadStatus::estimating: return "estimating";
    case WorkloadStatus::confirmed: return "confirmed";
    case WorkloadStatus::completed: return "completed";
    case WorkloadStatus::cancelled: return "cancelled";
  }
  return "unknown";
}

std::string_view to_string(InstanceState s) {
  switch (s) {
    case InstanceState::launching: return "launching";
    case InstanceState::idle: return "idle";
    case InstanceState::busy: return "busy";
    case InstanceState::terminating: return "terminating";
  }
  return "unknown";
}

ComputeUnits total_cus(std::span<const InstanceRecord> fleet) {
  ComputeUnits n = 0.0;
  for (const auto& inst : fleet) n += inst.cus_per_instance;
  return n;
}

Seconds total_billed_cus(std::span<const InstanceRecord> fleet) {
  Seconds c = 0.0;
  for (const auto& inst : fleet) c += inst.cus_per_instance * inst.billing_remaining;
  return c;
}

Seconds required_cus(const WorkloadState& w) {
  Seconds r = 0.0;
  for (const auto& pop : w.populations)
    r += static_cast<Seconds>(pop.remaining) * pop.cus_estimate;
  return r;
}

}  // namespace spotscale
