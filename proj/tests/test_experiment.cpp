#include <doctest.h>

#include <stdexcept>

#include "spotscale/experiment.hpp"

using namespace spotscale;
namespace ex = spotscale::experiment;

TEST_CASE("longest completion counts unfinished workloads up to the horizon") {
  SimReport r;
  WorkloadOutcome a, b;
  a.arrival = 300;
  a.completion = 2300;
  b.arrival = 600;
  r.workloads = {a};
  CHECK(ex::longest_completion(r, 9000) == 2000);
  r.workloads = {a, b};
  CHECK(ex::longest_completion(r, 9000) == 8400);
}

TEST_CASE("uniform TTC rewrites every workload") {
  const auto spec = ex::with_uniform_ttc(default_scenario_spec(7), 4321.0);
  for (const auto& e : spec.entries) CHECK(e.requested_ttc == 4321.0);
  const auto s = ex::with_uniform_ttc(generate_scenario(default_scenario_spec(7)), 99.0);
  for (const auto& w : s.workloads) CHECK(w.requested_ttc == 99.0);
  CHECK_THROWS_AS(ex::with_uniform_ttc(default_scenario_spec(7), 0.0), std::invalid_argument);
}

TEST_CASE("TTC calibration uses the autoscaler's longest completion") {
  ScenarioSpec spec;
  spec.entries = {{Family::face_detection, 200, 3600, -1}, {Family::transcoding, 10, 3600, -1}};
  const auto cal = ex::calibrate_ttc(SimConfig{}, spec, ControllerKind::as10);
  CHECK(cal.autoscaler.controller == ControllerKind::as10);
  Seconds longest = 0;
  for (const auto& w : cal.autoscaler.workloads) longest = std::max(longest, *w.completion - w.arrival);
  CHECK(cal.ttc == longest);
  CHECK_THROWS_AS(ex::calibrate_ttc(SimConfig{}, spec, ControllerKind::aimd), std::invalid_argument);
}

TEST_CASE("run_cell applies the cell's selections") {
  ScenarioSpec spec;
  spec.entries = {{Family::face_detection, 50, 1800, -1}};
  const auto r = ex::run_cell(SimConfig{}, generate_scenario(spec), {ControllerKind::mwa, EstimatorKind::arma, 3});
  CHECK(r.controller == ControllerKind::mwa);
  CHECK(r.estimator == EstimatorKind::arma);
}

TEST_CASE("benchmark rows and sample-weighted totals") {
  ex::BenchConfig b;
  b.families = {Family::face_detection, Family::transcoding};
  b.intervals = {300};
  b.workloads_per_family = 2;
  const auto rows = ex::bench_estimators(b);
  CHECK(rows.size() == 2 * 3);
  for (const auto& r : rows) CHECK(r.samples + r.unconverged == 2);

  std::vector<ex::BenchRow> fake{{Family::face_detection, EstimatorKind::kalman, 60, 3, 0, 100.0, 10.0},
                                 {Family::transcoding, EstimatorKind::kalman, 60, 1, 2, 500.0, 30.0},
                                 {Family::transcoding, EstimatorKind::arma, 60, 0, 4, 0.0, 0.0}};
  const auto totals = ex::bench_totals(fake);
  const auto& k = ex::find_total(totals, EstimatorKind::kalman, 60);
  CHECK(k.samples == 4);
  CHECK(k.mean_time_to_estimate == doctest::Approx(200.0));
  CHECK(k.mean_mae_pct == doctest::Approx(15.0));
  CHECK(ex::find_total(totals, EstimatorKind::arma, 60).samples == 0);
  CHECK_THROWS_AS(ex::find_total(totals, EstimatorKind::adhoc, 60), std::out_of_range);
  b.workloads_per_family = 0;
  CHECK_THROWS_AS(ex::bench_estimators(b), std::invalid_argument);
  CHECK(ex::bench_task_count(Family::sift_matlab) == 100);
}
