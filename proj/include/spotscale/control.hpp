#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "spotscale/domain.hpp"

namespace spotscale {

struct AimdParams {
  double alpha = 5.0;
  double beta = 0.9;
  double n_min = 10.0;
  double n_max = 100.0;

  void validate() const;
};

enum class ControllerKind { aimd, reactive, mwa, lr, as1, as10 };

std::string_view to_string(ControllerKind k);
ControllerKind controller_from_string(std::string_view name);
bool is_utilization_based(ControllerKind k);

double aimd_step(double n_tot, double n_star, const AimdParams& p);
double reactive_step(double n_star, const AimdParams& p);
// `history` is oldest first; fewer than six values are padded with the oldest.
double mwa_step(std::span<const double> history, const AimdParams& p);
double lr_step(std::span<const double> history, const AimdParams& p);
int utilization_as_step(double mean_cpu_utilization, int step_size, double threshold = 0.20);

struct TerminationPlan {
  std::vector<InstanceId> immediate;    // idle or still launching
  std::vector<InstanceId> after_chunk;  // busy, released when the chunk ends
};

// Picks `count` instances with the least time left before their next billing
// renewal. Instances that are not busy go first; busy ones are only deferred.
TerminationPlan select_terminations(std::span<const InstanceRecord> fleet, std::size_t count);

struct FleetObservation {
  Seconds elapsed = 0.0;
  double n_tot = 0.0;
  double n_star = 0.0;
  double utilization = 0.0;  // mean over running instances since the last AS tick
};

struct ControllerDecision {
  double target = 0.0;
  std::size_t launches = 0;
  TerminationPlan terminations;
};

// Stateful wrapper that owns the demand history of one run.
class FleetController {
 public:
  FleetController(ControllerKind kind, const AimdParams& params, Seconds as_period = 300.0,
                  double as_threshold = 0.20);

  ControllerKind kind() const { return kind_; }
  const AimdParams& params() const { return params_; }
  // Utilization controllers only act on their own evaluation period.
  bool acts_at(Seconds elapsed) const;
  double target(const FleetObservation& obs);

  // Converts a target into launches/terminations against the live fleet.
  ControllerDecision decide(const FleetObservation& obs, std::span<const InstanceRecord> fleet);

 private:
  ControllerKind kind_;
  AimdParams params_;
  Seconds as_period_;
  double as_threshold_;
  std::deque<double> history_;
};

}  // namespace spotscale
