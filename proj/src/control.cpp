#include "spotscale/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spotscale {
namespace {

constexpr std::size_t kHistory = 6;

std::array<double, kHistory> padded(std::span<const double> history) {
  if (history.empty()) throw std::invalid_argument("controller history is empty");
  std::array<double, kHistory> out{};
  const std::size_t n = std::min(history.size(), kHistory);
  const std::size_t pad = kHistory - n;
  auto tail = history.subspan(history.size() - n);
  for (std::size_t i = 0; i < pad; ++i) out[i] = tail.front();
  for (std::size_t i = 0; i < n; ++i) out[pad + i] = tail[i];
  return out;
}

double clamp_fleet(double n, const AimdParams& p) { return std::clamp(n, p.n_min, p.n_max); }

}  // namespace

void AimdParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(n_min >= 0.0 && n_min <= n_max)) throw std::invalid_argument("need 0 <= n_min <= n_max");
}

std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::aimd: return "aimd";
    case ControllerKind::reactive: return "reactive";
    case ControllerKind::mwa: return "mwa";
    case ControllerKind::lr: return "lr";
    case ControllerKind::as1: return "as1";
    case ControllerKind::as10: return "as10";
  }
  return "unknown";
}

ControllerKind controller_from_string(std::string_view name) {
  if (name == "aimd") return ControllerKind::aimd;
  if (name == "reactive") return ControllerKind::reactive;
  if (name == "mwa") return ControllerKind::mwa;
  if (name == "lr") return ControllerKind::lr;
  if (name == "as1") return ControllerKind::as1;
  if (name == "as10") return ControllerKind::as10;
  throw std::invalid_argument("unknown controller '" + std::string(name) + "'");
}

bool is_utilization_based(ControllerKind k) {
  return k == ControllerKind::as1 || k == ControllerKind::as10;
}

double aimd_step(double n_tot, double n_star, const AimdParams& p) {
  if (n_tot <= n_star) return std::min(n_tot + p.alpha, p.n_max);
  return std::max(p.beta * n_tot, p.n_min);
}

double reactive_step(double n_star, const AimdParams& p) { return clamp_fleet(n_star, p); }

double mwa_step(std::span<const double> history, const AimdParams& p) {
  const auto h = padded(history);
  double sum = 0.0;
  for (double x : h) sum += x;
  return clamp_fleet(sum / static_cast<double>(kHistory), p);
}

double lr_step(std::span<const double> history, const AimdParams& p) {
  const auto h = padded(history);
  const double n = static_cast<double>(kHistory);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < kHistory; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += h[i];
    sxx += x * x;
    sxy += x * h[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  return clamp_fleet(intercept + slope * n, p);
}

int utilization_as_step(double mean_cpu_utilization, int step_size, double threshold) {
  if (mean_cpu_utilization < 0.0 || mean_cpu_utilization > 1.0)
    throw std::invalid_argument("utilization must lie in [0, 1]");
  return mean_cpu_utilization > threshold ? step_size : -step_size;
}

TerminationPlan select_terminations(std::span<const InstanceRecord> fleet, std::size_t count) {
  std::vector<const InstanceRecord*> loose, busy;
  for (const auto& inst : fleet) {
    if (inst.state == InstanceState::terminating) continue;
    (inst.state == InstanceState::busy ? busy : loose).push_back(&inst);
  }
  auto soonest_renewal = [](const InstanceRecord* a, const InstanceRecord* b) {
    if (a->billing_remaining != b->billing_remaining)
      return a->billing_remaining < b->billing_remaining;
    return a->id < b->id;
  };
  std::sort(loose.begin(), loose.end(), soonest_renewal);
  std::sort(busy.begin(), busy.end(), soonest_renewal);

  TerminationPlan plan;
  for (const auto* inst : loose) {
    if (plan.immediate.size() == count) break;
    plan.immediate.push_back(inst->id);
  }
  for (const auto* inst : busy) {
    if (plan.immediate.size() + plan.after_chunk.size() == count) break;
    plan.after_chunk.push_back(inst->id);
  }
  return plan;
}

FleetController::FleetController(ControllerKind kind, const AimdParams& params,
                                 Seconds as_period, double as_threshold)
    : kind_(kind), params_(params), as_period_(as_period), as_threshold_(as_threshold) {
  params_.validate();
  if (!(as_period_ > 0.0)) throw std::invalid_argument("autoscaler period must be positive");
}

bool FleetController::acts_at(Seconds elapsed) const {
  if (!is_utilization_based(kind_)) return true;
  return elapsed > 0.0 && std::fmod(elapsed, as_period_) == 0.0;
}

double FleetController::target(const FleetObservation& obs) {
  history_.push_back(obs.n_star);
  while (history_.size() > kHistory) history_.pop_front();
  const std::vector<double> h(history_.begin(), history_.end());

  switch (kind_) {
    case ControllerKind::aimd: return aimd_step(obs.n_tot, obs.n_star, params_);
    case ControllerKind::reactive: return reactive_step(obs.n_star, params_);
    case ControllerKind::mwa: return mwa_step(h, params_);
    case ControllerKind::lr: return lr_step(h, params_);
    case ControllerKind::as1:
    case ControllerKind::as10: {
      if (!acts_at(obs.elapsed)) return obs.n_tot;
      const int step = kind_ == ControllerKind::as1 ? 1 : 10;
      const double next = obs.n_tot + utilization_as_step(obs.utilization, step, as_threshold_);
      return std::clamp(next, 1.0, std::max(1.0, params_.n_max));
    }
  }
  return obs.n_tot;
}

ControllerDecision FleetController::decide(const FleetObservation& obs,
                                           std::span<const InstanceRecord> fleet) {
  ControllerDecision d;
  d.target = target(obs);
  std::size_t alive = 0;
  for (const auto& inst : fleet)
    if (inst.state != InstanceState::terminating) ++alive;
  const auto wanted = static_cast<std::size_t>(std::max<long long>(0, std::llround(d.target)));
  if (wanted > alive) d.launches = wanted - alive;
  else if (wanted < alive) d.terminations = select_terminations(fleet, alive - wanted);
  return d;
}

}  // namespace spotscale
