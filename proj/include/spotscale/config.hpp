#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spotscale/cloudsim.hpp"
#include "spotscale/experiment.hpp"
#include "spotscale/workloads.hpp"

namespace spotscale::config {

using Json = nlohmann::ordered_json;

// Malformed or out-of-range configuration. `field` is the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ScenarioKind { default_mix, word_histogram, file, inline_spec };
enum class TtcPolicy { fixed, autoscaler };

std::string_view to_string(ScenarioKind k);
std::string_view to_string(TtcPolicy p);

struct ScenarioSource {
  ScenarioKind kind = ScenarioKind::default_mix;
  std::string path;      // kind == file: scenario written by `gen`
  std::string name;      // empty: the generator's own name
  Seconds requested_ttc = 7200.0;
  TtcPolicy ttc_policy = TtcPolicy::fixed;
  ControllerKind ttc_autoscaler = ControllerKind::as1;
  ScenarioSpec spec;     // inline entries, models and generator knobs
};

struct MatrixSelection {
  std::vector<ControllerKind> controllers{ControllerKind::aimd};
  std::vector<EstimatorKind> estimators{EstimatorKind::kalman};
  std::vector<std::uint64_t> seeds{7};
};

struct BenchSettings {
  std::vector<Family> families{Family::face_detection, Family::transcoding,
                               Family::feature_extraction, Family::sift_matlab};
  std::vector<std::int64_t> intervals{300, 60};
  int workloads_per_family = 8;
  Seconds requested_ttc = 7200.0;
};

struct RunConfig {
  SimConfig sim;
  ScenarioSource scenario;
  MatrixSelection matrix;
  BenchSettings bench;
  std::string output_dir = "out";

  void validate() const;
};

// Fully populated document of the defaults; every accepted key appears in it.
Json default_document();

RunConfig from_json(const Json& doc);
Json to_json(const RunConfig& config);

Json read_document(const std::filesystem::path& path);

// Sets one dotted key ("aimd.alpha=4"). The value is parsed as JSON when it
// can be, otherwise taken as a string; comma lists fill array keys.
void apply_override(Json& doc, std::string_view assignment);
void apply_override(Json& doc, std::string_view key, std::string_view value);

// Dotted paths of every leaf in the default document.
std::vector<std::string> leaf_keys();

RunConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// ---- scenarios --------------------------------------------------------------

// The spec a generated scenario kind draws from, with the seed applied.
ScenarioSpec scenario_spec(const ScenarioSource& source, std::uint64_t seed);

// The workloads of one matrix seed, before any TTC calibration.
Scenario build_scenario(const RunConfig& config, std::uint64_t seed);

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& doc);

}  // namespace spotscale::config
