#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotscale/cloudsim.hpp"
#include "spotscale/workloads.hpp"

namespace spotscale::experiment {

// Longest arrival-to-completion span of a run; incomplete workloads count up
// to the horizon.
Seconds longest_completion(const SimReport& report, Seconds horizon);

ScenarioSpec with_uniform_ttc(ScenarioSpec spec, Seconds ttc);
Scenario with_uniform_ttc(Scenario scenario, Seconds ttc);

struct TtcCalibration {
  Seconds ttc = 0.0;
  SimReport autoscaler;
};

// Runs the utilization autoscaler on the scenario and returns its longest
// completion time as the TTC for every workload.
TtcCalibration calibrate_ttc(const SimConfig& base, const ScenarioSpec& spec,
                             ControllerKind autoscaler = ControllerKind::as1);
TtcCalibration calibrate_ttc(const SimConfig& base, const Scenario& scenario,
                             ControllerKind autoscaler = ControllerKind::as1);

struct Cell {
  ControllerKind controller = ControllerKind::aimd;
  EstimatorKind estimator = EstimatorKind::kalman;
  std::uint64_t seed = 7;
};

struct CellResult {
  Cell cell;
  std::string scenario;
  Seconds ttc = 0.0;
  SimReport report;
  std::optional<std::string> error;
};

SimReport run_cell(SimConfig config, const Scenario& scenario, const Cell& cell);

// ---- estimator benchmark ----------------------------------------------------

struct BenchConfig {
  SimConfig base;
  std::vector<Family> families{Family::face_detection, Family::transcoding,
                               Family::feature_extraction, Family::sift_matlab};
  std::vector<EstimatorKind> estimators{EstimatorKind::kalman, EstimatorKind::adhoc,
                                        EstimatorKind::arma};
  std::vector<std::int64_t> intervals{300, 60};
  int workloads_per_family = 8;
  std::uint64_t seed = 7;
  Seconds requested_ttc = 7200.0;
};

// Task count of the benchmark workloads of one family.
std::int64_t bench_task_count(Family f);

struct BenchRow {
  Family family = Family::face_detection;
  EstimatorKind estimator = EstimatorKind::kalman;
  std::int64_t interval = 300;
  int samples = 0;      // workloads that reached an estimate
  int unconverged = 0;  // finished before any reliable estimate
  double mean_time_to_estimate = 0.0;  // seconds after arrival
  double mean_mae_pct = 0.0;
};

// One row per (family, estimator, interval), families innermost.
std::vector<BenchRow> bench_estimators(const BenchConfig& config);

struct BenchTotal {
  EstimatorKind estimator = EstimatorKind::kalman;
  std::int64_t interval = 300;
  int samples = 0;
  double mean_time_to_estimate = 0.0;
  double mean_mae_pct = 0.0;
};

// Sample-weighted means over all families.
std::vector<BenchTotal> bench_totals(const std::vector<BenchRow>& rows);
const BenchTotal& find_total(const std::vector<BenchTotal>& totals, EstimatorKind e,
                             std::int64_t interval);

}  // namespace spotscale::experiment
