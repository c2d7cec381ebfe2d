#include "spotscale/experiment.hpp"

#include <algorithm>
#include <stdexcept>

namespace spotscale::experiment {

Seconds longest_completion(const SimReport& report, Seconds horizon) {
  Seconds longest = 0.0;
  for (const auto& w : report.workloads) {
    const Seconds end = w.completion ? *w.completion : horizon;
    longest = std::max(longest, end - w.arrival);
  }
  return longest;
}

ScenarioSpec with_uniform_ttc(ScenarioSpec spec, Seconds ttc) {
  if (!(ttc > 0.0)) throw std::invalid_argument("TTC must be positive");
  for (auto& e : spec.entries) e.requested_ttc = ttc;
  return spec;
}

Scenario with_uniform_ttc(Scenario scenario, Seconds ttc) {
  if (!(ttc > 0.0)) throw std::invalid_argument("TTC must be positive");
  for (auto& w : scenario.workloads) w.requested_ttc = ttc;
  return scenario;
}

TtcCalibration calibrate_ttc(const SimConfig& base, const ScenarioSpec& spec,
                             ControllerKind autoscaler) {
  return calibrate_ttc(base, generate_scenario(spec), autoscaler);
}

TtcCalibration calibrate_ttc(const SimConfig& base, const Scenario& scenario,
                             ControllerKind autoscaler) {
  if (!is_utilization_based(autoscaler))
    throw std::invalid_argument("TTC calibration needs a utilization autoscaler");
  SimConfig config = base;
  config.controller = autoscaler;
  Simulation sim(config, scenario);
  TtcCalibration out;
  out.autoscaler = sim.run();
  out.ttc = longest_completion(out.autoscaler, sim.horizon());
  return out;
}

SimReport run_cell(SimConfig config, const Scenario& scenario, const Cell& cell) {
  config.controller = cell.controller;
  config.estimator = cell.estimator;
  config.seed = cell.seed;
  return Simulation(config, scenario).run();
}

std::int64_t bench_task_count(Family f) {
  switch (f) {
    case Family::face_detection: return 1000;
    case Family::transcoding: return 200;
    case Family::feature_extraction: return 1000;
    case Family::sift_matlab: return 100;
    case Family::split_merge: return 1000;
  }
  return 1;
}

std::vector<BenchRow> bench_estimators(const BenchConfig& config) {
  if (config.workloads_per_family < 1) throw std::invalid_argument("need at least one workload per family");
  std::vector<BenchRow> rows;
  for (std::int64_t interval : config.intervals) {
    for (EstimatorKind estimator : config.estimators) {
      for (Family family : config.families) {
        BenchRow row;
        row.family = family;
        row.estimator = estimator;
        row.interval = interval;
        double tte = 0.0, mae = 0.0;
        for (int i = 0; i < config.workloads_per_family; ++i) {
          ScenarioSpec spec;
          spec.name = "bench";
          spec.seed = config.seed + static_cast<std::uint64_t>(i);
          spec.entries.push_back({family, bench_task_count(family), config.requested_ttc, 0.0});
          SimConfig sc = config.base;
          sc.interval = interval;
          sc.estimator = estimator;
          sc.controller = ControllerKind::aimd;
          const auto report = Simulation(sc, generate_scenario(spec)).run();
          const auto& o = report.workloads.front();
          if (!o.time_to_estimate) {
            ++row.unconverged;
            continue;
          }
          ++row.samples;
          tte += *o.time_to_estimate;
          mae += o.mae_pct;
        }
        if (row.samples > 0) {
          row.mean_time_to_estimate = tte / row.samples;
          row.mean_mae_pct = mae / row.samples;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<BenchTotal> bench_totals(const std::vector<BenchRow>& rows) {
  std::vector<BenchTotal> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const BenchTotal& t) {
      return t.estimator == r.estimator && t.interval == r.interval;
    });
    if (it == out.end()) {
      out.push_back({r.estimator, r.interval, 0, 0.0, 0.0});
      it = std::prev(out.end());
    }
    it->mean_time_to_estimate += r.mean_time_to_estimate * r.samples;
    it->mean_mae_pct += r.mean_mae_pct * r.samples;
    it->samples += r.samples;
  }
  for (auto& t : out) {
    if (t.samples == 0) continue;
    t.mean_time_to_estimate /= t.samples;
    t.mean_mae_pct /= t.samples;
  }
  return out;
}

const BenchTotal& find_total(const std::vector<BenchTotal>& totals, EstimatorKind e,
                             std::int64_t interval) {
  for (const auto& t : totals)
    if (t.estimator == e && t.interval == interval) return t;
  throw std::out_of_range("no benchmark total for that estimator and interval");
}

}  // namespace spotscale::experiment
