#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "spotscale/config.hpp"

using namespace spotscale;
namespace cfg = spotscale::config;

namespace {

std::string field_of(const cfg::Json& doc) {
  try {
    cfg::from_json(doc);
  } catch (const cfg::ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::string override_field(std::string_view assignment) {
  cfg::Json doc = cfg::Json::object();
  try {
    cfg::apply_override(doc, assignment);
    cfg::from_json(doc);
  } catch (const cfg::ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("an empty document resolves to the defaults") {
  const auto c = cfg::from_json(cfg::Json::object());
  CHECK(c.sim.interval == 300);
  CHECK(c.sim.aimd.alpha == 5.0);
  CHECK(c.sim.aimd.beta == 0.9);
  CHECK(c.sim.aimd.n_min == 10.0);
  CHECK(c.sim.aimd.n_max == 100.0);
  CHECK(c.sim.per_workload_cap == 10.0);
  CHECK(c.sim.estimation.adhoc_gain == 0.1);
  CHECK(c.sim.estimation.process_var == 0.5);
  CHECK(c.sim.estimation.measurement_var == 0.5);
  CHECK(c.sim.footprint_fraction == 0.05);
  CHECK(c.sim.as_threshold == 0.2);
  CHECK(c.sim.price_per_instance_hour == 0.0081);
  CHECK(c.matrix.controllers == std::vector<ControllerKind>{ControllerKind::aimd});
  CHECK(c.scenario.kind == cfg::ScenarioKind::default_mix);
}

TEST_CASE("the resolved echo round-trips exactly") {
  const auto def = cfg::default_document();
  CHECK(cfg::to_json(cfg::from_json(def)) == def);

  cfg::Json doc = cfg::Json::object();
  cfg::apply_override(doc, "aimd.alpha=3.25");
  cfg::apply_override(doc, "matrix.controllers=aimd,mwa,as10");
  cfg::apply_override(doc, "matrix.seeds=1,2,3");
  cfg::apply_override(doc, "scenario.models.sift_matlab.deadband=30");
  cfg::apply_override(doc, "sim.interval=60");
  const auto first = cfg::to_json(cfg::from_json(doc));
  CHECK(cfg::to_json(cfg::from_json(first)) == first);
  CHECK(first["aimd"]["alpha"] == 3.25);
  CHECK(first["matrix"]["seeds"].size() == 3);
  CHECK(first["scenario"]["models"]["sift_matlab"]["deadband"] == 30);
  CHECK(first["scenario"]["models"]["sift_matlab"]["mean"] == 20.0);
}

TEST_CASE("errors name the offending field") {
  CHECK(field_of({{"aimd", {{"gama", 1}}}}) == "aimd.gama");
  CHECK(field_of({{"simulation", 1}}) == "simulation");
  CHECK(field_of({{"sim", {{"interval", "fast"}}}}) == "sim.interval");
  CHECK(field_of({{"sim", {{"interval", 2.5}}}}) == "sim.interval");
  CHECK(field_of({{"sim", {{"interval", 0}}}}) == "sim.interval");
  CHECK(field_of({{"aimd", {{"beta", 1.5}}}}) == "aimd.beta");
  CHECK(field_of({{"aimd", {{"n_min", 50}, {"n_max", 20}}}}) == "aimd.n_max");
  CHECK(field_of({{"estimator", {{"arma_delta", 0.9}, {"arma_gamma", 0.2}}}}) == "estimator.arma_gamma");
  CHECK(field_of({{"matrix", {{"controllers", cfg::Json::array()}}}}) == "matrix.controllers");
  CHECK(field_of({{"matrix", {{"controllers", {"aimd", "pid"}}}}}) == "matrix.controllers[1]");
  CHECK(field_of({{"matrix", {{"seeds", {-1}}}}}) == "matrix.seeds[0]");
  CHECK(field_of({{"scenario", {{"kind", "random"}}}}) == "scenario.kind");
  CHECK(field_of({{"scenario", {{"kind", "file"}}}}) == "scenario.path");
  CHECK(field_of({{"scenario", {{"kind", "inline"}}}}) == "scenario.workloads");
  CHECK(field_of({{"scenario", {{"workloads", {{{"family", "ocr"}, {"tasks", 3}}}}}}}) ==
        "scenario.workloads[0].family");
  CHECK(field_of({{"scenario", {{"workloads", {{{"family", "transcoding"}, {"tasks", 0}}}}}}}) ==
        "scenario.workloads[0].tasks");
  CHECK(field_of({{"scenario", {{"models", {{"ocr", {{"mean", 1}}}}}}}}) == "scenario.models.ocr");
  CHECK(field_of({{"scenario", {{"models", {{"transcoding", {{"mean", -1}}}}}}}}) ==
        "scenario.models.transcoding.mean");
  CHECK(field_of({{"scenario", {{"ttc_policy", "autoscaler"}, {"ttc_autoscaler", "aimd"}}}}) ==
        "scenario.ttc_autoscaler");
  CHECK(field_of({{"output_dir", ""}}) == "output_dir");
  CHECK(field_of(cfg::Json::array()) == "");
}

TEST_CASE("overrides parse values and check keys") {
  CHECK(override_field("sim.nope=1") == "sim.nope");
  CHECK(override_field("aimd.alpha") == "aimd.alpha");
  CHECK(override_field("aimd.beta=2") == "aimd.beta");
  CHECK(override_field("scenario.models.sift_matlab=3") == "scenario.models.sift_matlab");
  CHECK(override_field("aimd.alpha=7") == "<accepted>");

  cfg::Json doc = cfg::Json::object();
  cfg::apply_override(doc, "output_dir=123");
  cfg::apply_override(doc, "matrix.estimators=[\"arma\"]");
  cfg::apply_override(doc, "sim.record_events=true");
  const auto c = cfg::from_json(doc);
  CHECK(c.output_dir == "123");
  CHECK(c.matrix.estimators == std::vector<EstimatorKind>{EstimatorKind::arma});
  CHECK(c.sim.record_events);
}

TEST_CASE("every leaf key is a flag") {
  const auto keys = cfg::leaf_keys();
  for (const char* k : {"sim.interval", "aimd.alpha", "allocation.deadline_guard", "estimator.adhoc_gain",
                        "autoscaler.threshold", "scenario.kind", "matrix.seeds", "bench.intervals", "output_dir"})
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  for (const auto& k : keys) {
    cfg::Json doc = cfg::Json::object();
    const auto def = cfg::default_document();
    const auto dot = k.find('.');
    const cfg::Json& v = dot == std::string::npos ? def[k] : def[k.substr(0, dot)][k.substr(dot + 1)];
    CHECK_NOTHROW(cfg::apply_override(doc, k, v.is_string() ? v.get<std::string>() : v.dump()));
    CHECK_NOTHROW(cfg::from_json(doc));
  }
}

TEST_CASE("scenario kinds") {
  cfg::RunConfig c;
  const auto built = cfg::build_scenario(c, 11);
  const auto direct = generate_scenario(default_scenario_spec(11, 7200.0));
  REQUIRE(built.workloads.size() == direct.workloads.size());
  for (std::size_t i = 0; i < built.workloads.size(); ++i)
    CHECK(built.workloads[i].tasks.size() == direct.workloads[i].tasks.size());

  c.scenario.kind = cfg::ScenarioKind::word_histogram;
  c.scenario.requested_ttc = 3900.0;
  const auto wh = cfg::build_scenario(c, 7);
  REQUIRE(wh.workloads.size() == 1);
  CHECK(wh.workloads[0].tasks.size() == 14001);
  CHECK(wh.workloads[0].requested_ttc == 3900.0);

  const cfg::Json inline_doc = {{"scenario",
                                 {{"kind", "inline"},
                                  {"name", "tiny"},
                                  {"workloads",
                                   {{{"family", "face_detection"}, {"tasks", 5}},
                                    {{"family", "sift_matlab"}, {"tasks", 3}, {"arrival", 900}, {"requested_ttc", 600}}}}}}};
  const auto ic = cfg::from_json(inline_doc);
  const auto tiny = cfg::build_scenario(ic, 1);
  CHECK(tiny.name == "tiny");
  REQUIRE(tiny.workloads.size() == 2);
  CHECK(tiny.workloads[0].requested_ttc == 7200.0);
  CHECK(tiny.workloads[1].arrival == 900.0);
  CHECK(tiny.workloads[1].requested_ttc == 600.0);
  CHECK(cfg::to_json(cfg::from_json(cfg::to_json(ic))) == cfg::to_json(ic));
}

TEST_CASE("exported scenarios import bit for bit") {
  const auto s = generate_scenario(default_scenario_spec(5));
  const std::string text = cfg::scenario_to_json(s).dump();
  const auto back = cfg::scenario_from_json(cfg::Json::parse(text));
  CHECK(back.name == s.name);
  REQUIRE(back.workloads.size() == s.workloads.size());
  for (std::size_t i = 0; i < s.workloads.size(); ++i) {
    const auto& a = s.workloads[i];
    const auto& b = back.workloads[i];
    CHECK(a.family == b.family);
    CHECK(a.arrival == b.arrival);
    CHECK(a.deadband == b.deadband);
    REQUIRE(a.tasks.size() == b.tasks.size());
    for (std::size_t j = 0; j < a.tasks.size(); ++j) {
      CHECK(a.tasks[j].duration == b.tasks[j].duration);
      CHECK(a.tasks[j].gated == b.tasks[j].gated);
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "spotscale_config_test";
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "s.json") << text; }
  cfg::RunConfig c;
  c.scenario.kind = cfg::ScenarioKind::file;
  c.scenario.path = (dir / "s.json").string();
  CHECK(cfg::build_scenario(c, 99).workloads.size() == s.workloads.size());
  c.scenario.path = (dir / "missing.json").string();
  CHECK_THROWS_AS(cfg::build_scenario(c, 99), cfg::ConfigError);

  CHECK_THROWS_AS(cfg::scenario_from_json({{"name", "x"}, {"workloads", cfg::Json::array()}}), cfg::ConfigError);
  cfg::Json bad = cfg::scenario_to_json(s);
  bad["workloads"][0]["tasks"][0] = {0, -1.0, false};
  CHECK_THROWS_AS(cfg::scenario_from_json(bad), cfg::ConfigError);
}

TEST_CASE("config files load with overrides applied last") {
  const auto dir = std::filesystem::temp_directory_path() / "spotscale_config_test";
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "c.json") << R"({"aimd": {"alpha": 2}, "output_dir": "x"})"; }
  const auto c = cfg::load(dir / "c.json", {"aimd.alpha=6"});
  CHECK(c.sim.aimd.alpha == 6.0);
  CHECK(c.output_dir == "x");
  { std::ofstream(dir / "broken.json") << "{ not json"; }
  CHECK_THROWS_AS(cfg::load(dir / "broken.json"), cfg::ConfigError);
  CHECK_THROWS_AS(cfg::load(dir / "absent.json"), cfg::ConfigError);
}
