#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>

#include "spotscale/domain.hpp"

namespace spotscale {

// Mean observed CUS per item over the tasks of one (workload, type) that
// completed inside one monitoring interval.
struct Measurement {
  WorkloadId workload = 0;
  TypeId type = 0;
  Seconds mean_cus = 0.0;
  std::int64_t task_count = 0;
};

// Scalar Kalman filter state. Also reused by the fixed-gain estimator, which
// leaves the covariance untouched.
struct KalmanState {
  Seconds estimate = 0.0;
  double covariance = 0.0;
  double process_var = 0.5;
  double measurement_var = 0.5;
  double gain = 0.0;
  Seconds last_measurement = 0.0;
  std::array<Seconds, 2> slope_history{};  // [0] is the most recent delta
  int updates = 0;
  std::optional<Instant> converged_at;
};

KalmanState kalman_update(KalmanState s, const Measurement& m);
KalmanState adhoc_update(KalmanState s, const Measurement& m, double gain = 0.1);

// First instant at which the estimate went down. Once converged_at is set the
// stored value is returned unchanged.
std::optional<Instant> detect_convergence_slope(const KalmanState& s, Instant t);

struct ArmaState {
  double delta = 0.8;
  double gamma = 0.15;
  std::deque<Seconds> b_norm_history;  // newest first, at most three entries
  std::deque<Seconds> window;          // most recent estimates, newest last
  std::size_t window_size = 3;
  Seconds estimate = 0.0;
  std::optional<Instant> converged_at;
};

// Per-item normalized CUS: cumulative execution seconds extrapolated to the
// whole population by the completed fraction, divided by the population size.
Seconds normalized_cus(Seconds cumulative_exec, double completed_fraction,
                       std::int64_t population_size);

ArmaState arma_update(ArmaState s, Seconds b_norm);

// Converged when every value of a full window lies within `tolerance` of the
// window mean (relative). Latches like the slope rule.
std::optional<Instant> detect_convergence_window(const ArmaState& s, Instant t,
                                                 double tolerance = 0.20);

enum class EstimatorKind { kalman, adhoc, arma };

std::string_view to_string(EstimatorKind k);
EstimatorKind estimator_from_string(std::string_view name);

struct EstimatorParams {
  double process_var = 0.5;
  double measurement_var = 0.5;
  double adhoc_gain = 0.1;
  double arma_delta = 0.8;
  double arma_gamma = 0.15;
  double window_tolerance = 0.20;
  std::size_t arma_window = 0;  // 0 selects by monitoring interval
};

// Window length for ARMA convergence: ten samples at 1-minute monitoring,
// three otherwise.
std::size_t default_arma_window(Seconds interval);

// Per-(workload, type) estimator as driven by the simulator.
//
// Kalman and fixed-gain estimators consume the measurement of the previous
// interval at each instant, so an observation made in (t-1, t] moves the
// estimate at t+1. ARMA works from the cumulative execution time and updates
// in the same instant.
class CusEstimator {
 public:
  CusEstimator(EstimatorKind kind, const EstimatorParams& params, std::size_t arma_window);

  // Footprint result; becomes b~[0].
  void seed(Seconds exec_seconds, std::int64_t tasks, std::int64_t population_size);
  // Tasks completed in the current interval. May be called several times.
  void observe(Seconds exec_seconds, std::int64_t tasks);
  void advance(Instant t);

  Seconds estimate() const;
  std::optional<Instant> converged_at() const;
  bool seeded() const { return seeded_; }
  EstimatorKind kind() const { return kind_; }

 private:
  EstimatorKind kind_;
  EstimatorParams params_;
  KalmanState kalman_;
  ArmaState arma_;
  bool seeded_ = false;
  std::optional<Seconds> lagged_;
  Seconds pending_exec_ = 0.0;
  std::int64_t pending_tasks_ = 0;
  Seconds cumulative_exec_ = 0.0;
  std::int64_t cumulative_tasks_ = 0;
  std::int64_t population_size_ = 0;
};

}  // namespace spotscale
