#include "spotscale/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spotscale {
namespace {

void check_measurement(const Measurement& m) {
  if (!(m.mean_cus >= 0.0))
    throw std::invalid_argument("measurement must be non-negative");
  if (m.task_count <= 0)
    throw std::invalid_argument("measurement carries no completed task");
}

void push_delta(KalmanState& s, Seconds before) {
  s.slope_history[1] = s.slope_history[0];
  s.slope_history[0] = s.estimate - before;
  ++s.updates;
}

}  // namespace

KalmanState kalman_update(KalmanState s, const Measurement& m) {
  check_measurement(m);
  const double prior = s.covariance + s.process_var;
  const double gain = prior / (prior + s.measurement_var);
  const Seconds before = s.estimate;
  s.estimate = before + gain * (m.mean_cus - before);
  s.covariance = (1.0 - gain) * prior;
  s.gain = gain;
  s.last_measurement = m.mean_cus;
  push_delta(s, before);
  return s;
}

KalmanState adhoc_update(KalmanState s, const Measurement& m, double gain) {
  check_measurement(m);
  const Seconds before = s.estimate;
  s.estimate = before + gain * (m.mean_cus - before);
  s.gain = gain;
  s.last_measurement = m.mean_cus;
  push_delta(s, before);
  return s;
}

std::optional<Instant> detect_convergence_slope(const KalmanState& s, Instant t) {
  if (s.converged_at) return s.converged_at;
  if (s.updates >= 2 && s.slope_history[0] < 0.0) return t;
  return std::nullopt;
}

Seconds normalized_cus(Seconds cumulative_exec, double completed_fraction,
                       std::int64_t population_size) {
  if (!(completed_fraction > 0.0))
    throw std::invalid_argument("completed fraction must be positive");
  if (population_size <= 0) throw std::invalid_argument("empty population");
  return cumulative_exec / completed_fraction / static_cast<double>(population_size);
}

ArmaState arma_update(ArmaState s, Seconds b_norm) {
  if (s.delta < 0.0 || s.gamma < 0.0 || s.delta + s.gamma > 1.0 + 1e-12)
    throw std::invalid_argument("ARMA weights must be non-negative and sum to at most one");
  if (s.b_norm_history.empty()) s.b_norm_history.assign(3, b_norm);
  else {
    s.b_norm_history.push_front(b_norm);
    s.b_norm_history.resize(3);
  }
  const auto& h = s.b_norm_history;
  s.estimate = s.delta * h[0] + s.gamma * h[1] + (1.0 - s.delta - s.gamma) * h[2];
  s.window.push_back(s.estimate);
  while (s.window.size() > s.window_size) s.window.pop_front();
  return s;
}

std::optional<Instant> detect_convergence_window(const ArmaState& s, Instant t,
                                                 double tolerance) {
  if (s.converged_at) return s.converged_at;
  if (s.window.size() < s.window_size || s.window.empty()) return std::nullopt;
  double mean = 0.0;
  for (double x : s.window) mean += x;
  mean /= static_cast<double>(s.window.size());
  if (!(mean > 0.0)) return std::nullopt;
  double worst = 0.0;
  for (double x : s.window) worst = std::max(worst, std::abs(x - mean) / mean);
  if (worst <= tolerance) return t;
  return std::nullopt;
}

std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kalman: return "kalman";
    case EstimatorKind::adhoc: return "adhoc";
    case EstimatorKind::arma: return "arma";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "kalman") return EstimatorKind::kalman;
  if (name == "adhoc") return EstimatorKind::adhoc;
  if (name == "arma") return EstimatorKind::arma;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

std::size_t default_arma_window(Seconds interval) { return interval <= 60.0 ? 10 : 3; }

CusEstimator::CusEstimator(EstimatorKind kind, const EstimatorParams& params,
                           std::size_t arma_window)
    : kind_(kind), params_(params) {
  kalman_.process_var = params.process_var;
  kalman_.measurement_var = params.measurement_var;
  arma_.delta = params.arma_delta;
  arma_.gamma = params.arma_gamma;
  arma_.window_size = std::max<std::size_t>(1, arma_window);
}

void CusEstimator::seed(Seconds exec_seconds, std::int64_t tasks,
                        std::int64_t population_size) {
  if (tasks <= 0) throw std::invalid_argument("footprint produced no measurement");
  seeded_ = true;
  population_size_ = population_size;
  cumulative_exec_ = exec_seconds;
  cumulative_tasks_ = tasks;
  if (kind_ == EstimatorKind::arma) {
    const double fraction = static_cast<double>(tasks) / static_cast<double>(population_size);
    arma_ = arma_update(arma_, normalized_cus(exec_seconds, fraction, population_size));
  } else {
    lagged_ = exec_seconds / static_cast<double>(tasks);
  }
}

void CusEstimator::observe(Seconds exec_seconds, std::int64_t tasks) {
  pending_exec_ += exec_seconds;
  pending_tasks_ += tasks;
}

void CusEstimator::advance(Instant t) {
  if (!seeded_) return;
  const bool fresh = pending_tasks_ > 0;
  if (kind_ == EstimatorKind::arma) {
    if (fresh) {
      cumulative_exec_ += pending_exec_;
      cumulative_tasks_ += pending_tasks_;
      const double fraction =
          static_cast<double>(cumulative_tasks_) / static_cast<double>(population_size_);
      arma_ = arma_update(arma_, normalized_cus(cumulative_exec_, fraction, population_size_));
      if (auto c = detect_convergence_window(arma_, t, params_.window_tolerance))
        arma_.converged_at = c;
    }
  } else {
    if (lagged_) {
      const Measurement m{0, 0, *lagged_, 1};
      kalman_ = kind_ == EstimatorKind::kalman ? kalman_update(kalman_, m)
                                               : adhoc_update(kalman_, m, params_.adhoc_gain);
      if (auto c = detect_convergence_slope(kalman_, t)) kalman_.converged_at = c;
    }
    if (fresh) lagged_ = pending_exec_ / static_cast<double>(pending_tasks_);
    else lagged_.reset();
  }
  pending_exec_ = 0.0;
  pending_tasks_ = 0;
}

Seconds CusEstimator::estimate() const {
  return kind_ == EstimatorKind::arma ? arma_.estimate : kalman_.estimate;
}

std::optional<Instant> CusEstimator::converged_at() const {
  return kind_ == EstimatorKind::arma ? arma_.converged_at : kalman_.converged_at;
}

}  // namespace spotscale
