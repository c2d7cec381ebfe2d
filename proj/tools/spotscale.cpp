#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "spotscale/config.hpp"
#include "spotscale/experiment.hpp"
#include "spotscale/report.hpp"

namespace fs = std::filesystem;
namespace cfg = spotscale::config;
namespace ex = spotscale::experiment;
namespace rep = spotscale::report;

namespace {

enum Exit { ok = 0, config_error = 1, run_failure = 2, ttc_violations = 3 };

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // config key -> raw value
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config_path, "JSON config file")->required();
  cmd->add_option("--set", c.sets, "override a config key, key=value (repeatable)");
  auto* group = cmd->add_option_group("config keys", "every config key is also a flag");
  for (const auto& key : cfg::leaf_keys())
    group->add_option_function<std::string>(
        "--" + key, [&c, key](const std::string& v) { c.flags[key] = v; }, "sets " + key);
}

cfg::RunConfig resolve(const Common& c) {
  cfg::Json doc = cfg::read_document(c.config_path);
  for (const auto& s : c.sets) cfg::apply_override(doc, s);
  for (const auto& [k, v] : c.flags) cfg::apply_override(doc, k, v);
  return cfg::from_json(doc);
}

struct Prepared {
  std::uint64_t seed = 0;
  spotscale::Scenario scenario;
  spotscale::Seconds ttc = 0.0;
};

Prepared prepare(const cfg::RunConfig& config, std::uint64_t seed) {
  Prepared p;
  p.seed = seed;
  p.scenario = cfg::build_scenario(config, seed);
  if (config.scenario.ttc_policy == cfg::TtcPolicy::autoscaler) {
    spotscale::SimConfig base = config.sim;
    base.seed = seed;
    const auto cal = ex::calibrate_ttc(base, p.scenario, config.scenario.ttc_autoscaler);
    p.ttc = cal.ttc;
    p.scenario = ex::with_uniform_ttc(std::move(p.scenario), cal.ttc);
  } else {
    for (const auto& w : p.scenario.workloads) p.ttc = std::max(p.ttc, w.requested_ttc);
  }
  return p;
}

int cmd_run(const Common& common, bool strict, int jobs) {
  cfg::RunConfig config;
  try {
    config = resolve(common);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }

  std::vector<Prepared> prepared;
  try {
    for (auto seed : config.matrix.seeds) prepared.push_back(prepare(config, seed));
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return run_failure;
  }

  struct Job {
    const Prepared* prep;
    ex::Cell cell;
  };
  std::vector<Job> work;
  for (const auto& p : prepared)
    for (auto k : config.matrix.controllers)
      for (auto e : config.matrix.estimators) work.push_back({&p, {k, e, p.seed}});

  std::vector<ex::CellResult> results(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
      ex::CellResult& r = results[i];
      r.cell = work[i].cell;
      r.scenario = work[i].prep->scenario.name;
      r.ttc = work[i].prep->ttc;
      try {
        spotscale::SimConfig sc = config.sim;
        r.report = ex::run_cell(sc, work[i].prep->scenario, r.cell);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(work.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool failed = false, violated = false;
  try {
    const fs::path out = config.output_dir;
    fs::create_directories(out);
    rep::write_text(out / "resolved_config.json", cfg::to_json(config).dump(2) + "\n");
    for (const auto& r : results) rep::write_cell(out / rep::cell_dir_name(r), r);
    rep::write_text(out / "summary.json", rep::dump(rep::matrix_summary(results)));
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return run_failure;
  }

  std::printf("%-16s %6s %-9s %-7s %10s %10s %6s %5s\n", "scenario", "seed", "controller",
              "estim", "cost", "lb", "fleet", "viol");
  for (const auto& r : results) {
    if (r.error) {
      failed = true;
      std::printf("%-16s %6llu %-9s %-7s  error: %s\n", r.scenario.c_str(),
                  static_cast<unsigned long long>(r.cell.seed),
                  std::string(to_string(r.cell.controller)).c_str(),
                  std::string(to_string(r.cell.estimator)).c_str(), r.error->c_str());
      continue;
    }
    if (!r.report.violations.empty()) violated = true;
    std::printf("%-16s %6llu %-9s %-7s %10s %10s %6d %5zu\n", r.scenario.c_str(),
                static_cast<unsigned long long>(r.cell.seed),
                std::string(to_string(r.cell.controller)).c_str(),
                std::string(to_string(r.cell.estimator)).c_str(), rep::fixed(r.report.final_cost).c_str(),
                rep::fixed(r.report.lb_cost).c_str(), r.report.max_fleet, r.report.violations.size());
  }
  if (failed) return run_failure;
  if (strict && violated) return ttc_violations;
  return ok;
}

int cmd_gen(const Common& common, const std::string& out_path, std::int64_t seed_flag) {
  cfg::RunConfig config;
  try {
    config = resolve(common);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : config.matrix.seeds.front();
  std::string text;
  try {
    text = cfg::scenario_to_json(prepare(config, seed).scenario).dump() + "\n";
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return run_failure;
  }
  try {
    if (out_path.empty() || out_path == "-") {
      std::cout << text;
    } else {
      if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
        fs::create_directories(parent);
      rep::write_text(out_path, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return run_failure;
  }
  return ok;
}

int cmd_bench(const Common& common) {
  cfg::RunConfig config;
  try {
    config = resolve(common);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  ex::BenchConfig bench;
  bench.base = config.sim;
  bench.families = config.bench.families;
  bench.estimators = config.matrix.estimators;
  bench.intervals = config.bench.intervals;
  bench.workloads_per_family = config.bench.workloads_per_family;
  bench.seed = config.matrix.seeds.front();
  bench.requested_ttc = config.bench.requested_ttc;
  try {
    const auto rows = ex::bench_estimators(bench);
    const auto totals = ex::bench_totals(rows);
    const fs::path out = config.output_dir;
    fs::create_directories(out);
    rep::write_text(out / "resolved_config.json", cfg::to_json(config).dump(2) + "\n");
    rep::write_text(out / "bench.json", rep::dump(rep::bench_summary(rows, totals)));
    std::ostringstream csv;
    rep::write_bench_csv(csv, rows);
    rep::write_text(out / "bench.csv", csv.str());
    std::printf("%-8s %8s %8s %14s %10s\n", "estim", "interval", "samples", "time_to_est_s", "mae_pct");
    for (const auto& t : totals)
      std::printf("%-8s %8lld %8d %14s %10s\n", std::string(to_string(t.estimator)).c_str(),
                  static_cast<long long>(t.interval), t.samples,
                  rep::fixed(t.mean_time_to_estimate).c_str(), rep::fixed(t.mean_mae_pct).c_str());
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return run_failure;
  }
  return ok;
}

int cmd_validate(const Common& common) {
  try {
    const auto config = resolve(common);
    if (config.scenario.kind == cfg::ScenarioKind::file) cfg::build_scenario(config, config.matrix.seeds.front());
    std::cout << cfg::to_json(config).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time autoscaling simulator for hourly-billed spot instances"};
  app.require_subcommand(1);

  Common run_opts, gen_opts, bench_opts, validate_opts;
  bool strict = false;
  int jobs = 1;
  std::string gen_out;
  std::int64_t gen_seed = -1;

  auto* run = app.add_subcommand("run", "execute the controller x estimator x seed matrix");
  add_common(run, run_opts);
  run->add_flag("--strict", strict, "exit 3 when any workload misses its TTC");
  run->add_option("-j,--jobs", jobs, "cells run in parallel")->check(CLI::Range(1, 256));

  auto* gen = app.add_subcommand("gen", "write the resolved scenario as a reusable file");
  add_common(gen, gen_opts);
  gen->add_option("-o,--out", gen_out, "output path, '-' for stdout");
  gen->add_option("--seed", gen_seed, "scenario seed (default: first matrix seed)");

  auto* bench = app.add_subcommand("bench-estimators", "time-to-estimate and MAE per estimator");
  add_common(bench, bench_opts);

  auto* validate = app.add_subcommand("validate", "check a config and print it resolved");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  if (*run) return cmd_run(run_opts, strict, jobs);
  if (*gen) return cmd_gen(gen_opts, gen_out, gen_seed);
  if (*bench) return cmd_bench(bench_opts);
  if (*validate) return cmd_validate(validate_opts);
  return config_error;
}
