#include "spotscale/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spotscale::config {
namespace {

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Reads typed values out of one JSON object and reports the dotted path of
// anything malformed.
class Section {
 public:
  Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const Json& raw(std::string_view key) const {
    auto it = node_.find(std::string(key));
    if (it == node_.end()) throw ConfigError(join(path_, key), "missing");
    return *it;
  }
  bool has(std::string_view key) const { return node_.contains(std::string(key)); }
  std::string field(std::string_view key) const { return join(path_, key); }

  double number(std::string_view key) const {
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }
  double positive(std::string_view key) const {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError(field(key), "must be positive");
    return x;
  }
  double non_negative(std::string_view key) const {
    const double x = number(key);
    if (x < 0.0) throw ConfigError(field(key), "must be non-negative");
    return x;
  }
  double unit(std::string_view key, bool open_low) const {
    const double x = number(key);
    if (x > 1.0 || x < 0.0 || (open_low && x == 0.0))
      throw ConfigError(field(key), open_low ? "must lie in (0, 1]" : "must lie in [0, 1]");
    return x;
  }
  std::int64_t integer(std::string_view key) const { return as_integer(raw(key), field(key)); }
  bool boolean(std::string_view key) const {
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(std::string_view key) const {
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }
  const Json& array(std::string_view key) const {
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected a list");
    return v;
  }
  Section object(std::string_view key) const { return Section(raw(key), field(key)); }

  static std::int64_t as_integer(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15)
        return static_cast<std::int64_t>(x);
    }
    throw ConfigError(where, "expected an integer");
  }

 private:
  const Json& node_;
  std::string path_;
};

template <class T, class Parse>
std::vector<T> parse_list(const Section& s, std::string_view key, Parse parse) {
  const Json& list = s.array(key);
  if (list.empty()) throw ConfigError(s.field(key), "must not be empty");
  std::vector<T> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = s.field(key) + "[" + std::to_string(i) + "]";
    try {
      out.push_back(parse(list[i], where));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where, e.what());
    }
  }
  return out;
}

template <class T, class Parse>
T parse_name(const Section& s, std::string_view key, Parse parse) {
  const std::string name = s.string(key);
  try {
    return parse(name);
  } catch (const std::exception& e) {
    throw ConfigError(s.field(key), e.what());
  }
}

std::string string_of(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "expected a string");
  return v.get<std::string>();
}

ScenarioKind kind_from_string(std::string_view s) {
  if (s == "default") return ScenarioKind::default_mix;
  if (s == "word_histogram") return ScenarioKind::word_histogram;
  if (s == "file") return ScenarioKind::file;
  if (s == "inline") return ScenarioKind::inline_spec;
  throw std::invalid_argument("unknown scenario kind '" + std::string(s) +
                              "' (default, word_histogram, file, inline)");
}

TtcPolicy policy_from_string(std::string_view s) {
  if (s == "fixed") return TtcPolicy::fixed;
  if (s == "autoscaler") return TtcPolicy::autoscaler;
  throw std::invalid_argument("unknown TTC policy '" + std::string(s) + "' (fixed, autoscaler)");
}

// Unknown keys are rejected wherever the defaults define the object shape.
void check_keys(const Json& doc, const Json& shape, const std::string& path) {
  if (!doc.is_object() || !shape.is_object()) return;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string where = join(path, it.key());
    if (where == "scenario.models" || where == "scenario.workloads") continue;
    if (!shape.contains(it.key())) throw ConfigError(where, "unknown key");
    check_keys(it.value(), shape[it.key()], where);
  }
}

void merge_into(Json& base, const Json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object() &&
        it.key() != "models")
      merge_into(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

Json parse_scalar(std::string_view text) {
  Json v = Json::parse(text.begin(), text.end(), nullptr, false);
  if (v.is_discarded()) return Json(std::string(text));
  return v;
}

TaskModel read_model(const Section& s, Family f) {
  TaskModel m;
  m.family = f;
  m.mean = s.positive("mean");
  m.dispersion = s.non_negative("dispersion");
  m.deadband = s.non_negative("deadband");
  return m;
}

Json model_json(const TaskModel& m) {
  return Json{{"mean", m.mean}, {"dispersion", m.dispersion}, {"deadband", m.deadband}};
}

std::uint64_t read_seed(const Json& v, const std::string& where) {
  const std::int64_t x = Section::as_integer(v, where);
  if (x < 0) throw ConfigError(where, "must be non-negative");
  return static_cast<std::uint64_t>(x);
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::default_mix: return "default";
    case ScenarioKind::word_histogram: return "word_histogram";
    case ScenarioKind::file: return "file";
    case ScenarioKind::inline_spec: return "inline";
  }
  return "unknown";
}

std::string_view to_string(TtcPolicy p) {
  return p == TtcPolicy::fixed ? "fixed" : "autoscaler";
}

void RunConfig::validate() const {
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sim", e.what());
  }
  if (matrix.controllers.empty()) throw ConfigError("matrix.controllers", "must not be empty");
  if (matrix.estimators.empty()) throw ConfigError("matrix.estimators", "must not be empty");
  if (matrix.seeds.empty()) throw ConfigError("matrix.seeds", "must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (scenario.kind == ScenarioKind::file && scenario.path.empty())
    throw ConfigError("scenario.path", "required when scenario.kind is file");
  if (scenario.kind == ScenarioKind::inline_spec && scenario.spec.entries.empty())
    throw ConfigError("scenario.workloads", "required when scenario.kind is inline");
  if (scenario.ttc_policy == TtcPolicy::autoscaler && !is_utilization_based(scenario.ttc_autoscaler))
    throw ConfigError("scenario.ttc_autoscaler", "must be as1 or as10");
  if (bench.workloads_per_family < 1) throw ConfigError("bench.workloads_per_family", "must be at least 1");
  for (auto i : bench.intervals)
    if (i <= 0) throw ConfigError("bench.intervals", "must be positive");
}

Json default_document() { return to_json(RunConfig{}); }

Json to_json(const RunConfig& c) {
  const SimConfig& s = c.sim;
  Json doc;
  doc["sim"] = {{"interval", s.interval},
                {"billing_period", s.billing_period},
                {"launch_delay", s.launch_delay},
                {"price_per_instance_hour", s.price_per_instance_hour},
                {"transport_overhead", s.transport_overhead},
                {"horizon", s.horizon},
                {"initial_fleet", s.initial_fleet},
                {"record_events", s.record_events}};
  doc["aimd"] = {{"alpha", s.aimd.alpha},
                 {"beta", s.aimd.beta},
                 {"n_min", s.aimd.n_min},
                 {"n_max", s.aimd.n_max}};
  doc["allocation"] = {{"per_workload_cap", s.per_workload_cap},
                       {"footprint_fraction", s.footprint_fraction},
                       {"bootstrap_rate", s.bootstrap_rate},
                       {"deadline_guard", s.deadline_guard}};
  doc["estimator"] = {{"process_var", s.estimation.process_var},
                      {"measurement_var", s.estimation.measurement_var},
                      {"adhoc_gain", s.estimation.adhoc_gain},
                      {"arma_delta", s.estimation.arma_delta},
                      {"arma_gamma", s.estimation.arma_gamma},
                      {"window_tolerance", s.estimation.window_tolerance},
                      {"arma_window", s.estimation.arma_window}};
  doc["autoscaler"] = {{"period", s.as_period}, {"threshold", s.as_threshold}};

  const ScenarioSource& src = c.scenario;
  Json sc;
  sc["kind"] = to_string(src.kind);
  sc["path"] = src.path;
  sc["name"] = src.name;
  sc["requested_ttc"] = src.requested_ttc;
  sc["ttc_policy"] = to_string(src.ttc_policy);
  sc["ttc_autoscaler"] = to_string(src.ttc_autoscaler);
  sc["arrival_spacing"] = src.spec.arrival_spacing;
  sc["merge_duration"] = src.spec.merge_duration;
  sc["split_ttc_fraction"] = src.spec.split_ttc_fraction;
  Json workloads = Json::array();
  for (const auto& e : src.spec.entries)
    workloads.push_back({{"family", to_string(e.family)},
                         {"tasks", e.tasks},
                         {"requested_ttc", e.requested_ttc},
                         {"arrival", e.arrival}});
  sc["workloads"] = workloads;
  Json models = Json::object();
  for (Family f : {Family::face_detection, Family::transcoding, Family::feature_extraction,
                   Family::sift_matlab, Family::split_merge})
    models[std::string(to_string(f))] = model_json(src.spec.model(f));
  sc["models"] = models;
  doc["scenario"] = sc;

  Json controllers = Json::array(), estimators = Json::array(), seeds = Json::array();
  for (auto k : c.matrix.controllers) controllers.push_back(to_string(k));
  for (auto e : c.matrix.estimators) estimators.push_back(to_string(e));
  for (auto seed : c.matrix.seeds) seeds.push_back(seed);
  doc["matrix"] = {{"controllers", controllers}, {"estimators", estimators}, {"seeds", seeds}};

  Json families = Json::array();
  for (auto f : c.bench.families) families.push_back(to_string(f));
  doc["bench"] = {{"families", families},
                  {"intervals", c.bench.intervals},
                  {"workloads_per_family", c.bench.workloads_per_family},
                  {"requested_ttc", c.bench.requested_ttc}};
  doc["output_dir"] = c.output_dir;
  return doc;
}

RunConfig from_json(const Json& input) {
  if (!input.is_object()) throw ConfigError("", "config must be a JSON object");
  Json doc = default_document();
  check_keys(input, doc, "");
  merge_into(doc, input);
  const Section root(doc, "");

  RunConfig c;
  SimConfig& s = c.sim;
  {
    const Section sec = root.object("sim");
    s.interval = sec.integer("interval");
    if (s.interval <= 0) throw ConfigError(sec.field("interval"), "must be positive");
    s.billing_period = sec.positive("billing_period");
    s.launch_delay = sec.non_negative("launch_delay");
    s.price_per_instance_hour = sec.non_negative("price_per_instance_hour");
    s.transport_overhead = sec.non_negative("transport_overhead");
    s.horizon = sec.non_negative("horizon");
    const std::int64_t fleet = sec.integer("initial_fleet");
    if (fleet > std::numeric_limits<int>::max()) throw ConfigError(sec.field("initial_fleet"), "too large");
    s.initial_fleet = static_cast<int>(std::max<std::int64_t>(fleet, -1));
    s.record_events = sec.boolean("record_events");
  }
  {
    const Section sec = root.object("aimd");
    s.aimd.alpha = sec.non_negative("alpha");
    s.aimd.beta = sec.unit("beta", true);
    s.aimd.n_min = sec.non_negative("n_min");
    s.aimd.n_max = sec.positive("n_max");
    if (s.aimd.n_max < s.aimd.n_min) throw ConfigError(sec.field("n_max"), "must be at least n_min");
  }
  {
    const Section sec = root.object("allocation");
    s.per_workload_cap = sec.positive("per_workload_cap");
    s.footprint_fraction = sec.unit("footprint_fraction", true);
    s.bootstrap_rate = sec.positive("bootstrap_rate");
    s.deadline_guard = sec.non_negative("deadline_guard");
  }
  {
    const Section sec = root.object("estimator");
    s.estimation.process_var = sec.positive("process_var");
    s.estimation.measurement_var = sec.positive("measurement_var");
    s.estimation.adhoc_gain = sec.unit("adhoc_gain", true);
    s.estimation.arma_delta = sec.unit("arma_delta", false);
    s.estimation.arma_gamma = sec.unit("arma_gamma", false);
    if (s.estimation.arma_delta + s.estimation.arma_gamma > 1.0)
      throw ConfigError(sec.field("arma_gamma"), "arma_delta + arma_gamma must not exceed 1");
    s.estimation.window_tolerance = sec.positive("window_tolerance");
    const std::int64_t window = sec.integer("arma_window");
    if (window < 0) throw ConfigError(sec.field("arma_window"), "must be non-negative");
    s.estimation.arma_window = static_cast<std::size_t>(window);
  }
  {
    const Section sec = root.object("autoscaler");
    s.as_period = sec.positive("period");
    s.as_threshold = sec.unit("threshold", false);
  }
  {
    const Section sec = root.object("scenario");
    ScenarioSource& src = c.scenario;
    src.kind = parse_name<ScenarioKind>(sec, "kind", kind_from_string);
    src.path = sec.string("path");
    src.name = sec.string("name");
    src.requested_ttc = sec.positive("requested_ttc");
    src.ttc_policy = parse_name<TtcPolicy>(sec, "ttc_policy", policy_from_string);
    src.ttc_autoscaler = parse_name<ControllerKind>(sec, "ttc_autoscaler", controller_from_string);
    src.spec.arrival_spacing = sec.non_negative("arrival_spacing");
    src.spec.merge_duration = sec.positive("merge_duration");
    src.spec.split_ttc_fraction = sec.unit("split_ttc_fraction", true);
    const Json& list = sec.array("workloads");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section w(list[i], sec.field("workloads") + "[" + std::to_string(i) + "]");
      for (auto it = list[i].begin(); it != list[i].end(); ++it) {
        const std::string& k = it.key();
        if (k != "family" && k != "tasks" && k != "requested_ttc" && k != "arrival")
          throw ConfigError(w.field(k), "unknown key");
      }
      WorkloadEntry e;
      e.family = parse_name<Family>(w, "family", family_from_string);
      e.tasks = w.integer("tasks");
      if (e.tasks < 1) throw ConfigError(w.field("tasks"), "must be at least 1");
      e.requested_ttc = w.has("requested_ttc") ? w.positive("requested_ttc") : src.requested_ttc;
      e.arrival = w.has("arrival") ? w.number("arrival") : -1.0;
      src.spec.entries.push_back(e);
    }
    const Section models = sec.object("models");
    const Json& mdoc = sec.raw("models");
    for (auto it = mdoc.begin(); it != mdoc.end(); ++it) {
      Family f;
      try {
        f = family_from_string(it.key());
      } catch (const std::exception& e) {
        throw ConfigError(models.field(it.key()), e.what());
      }
      const Section m = models.object(it.key());
      for (auto kt = it.value().begin(); kt != it.value().end(); ++kt)
        if (kt.key() != "mean" && kt.key() != "dispersion" && kt.key() != "deadband")
          throw ConfigError(m.field(kt.key()), "unknown key");
      Json full = model_json(default_task_model(f));
      merge_into(full, it.value());
      src.spec.models[f] = read_model(Section(full, models.field(it.key())), f);
    }
  }
  {
    const Section sec = root.object("matrix");
    c.matrix.controllers = parse_list<ControllerKind>(sec, "controllers", [](const Json& v, const std::string& w) {
      return controller_from_string(string_of(v, w));
    });
    c.matrix.estimators = parse_list<EstimatorKind>(sec, "estimators", [](const Json& v, const std::string& w) {
      return estimator_from_string(string_of(v, w));
    });
    c.matrix.seeds = parse_list<std::uint64_t>(sec, "seeds", read_seed);
  }
  {
    const Section sec = root.object("bench");
    c.bench.families = parse_list<Family>(sec, "families", [](const Json& v, const std::string& w) {
      return family_from_string(string_of(v, w));
    });
    c.bench.intervals = parse_list<std::int64_t>(sec, "intervals", Section::as_integer);
    const std::int64_t n = sec.integer("workloads_per_family");
    if (n < 1 || n > 100000) throw ConfigError(sec.field("workloads_per_family"), "must lie in [1, 100000]");
    c.bench.workloads_per_family = static_cast<int>(n);
    c.bench.requested_ttc = sec.positive("requested_ttc");
  }
  c.output_dir = root.string("output_dir");
  c.validate();
  return c;
}

Json read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json doc = Json::parse(text, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError("", "'" + path.string() + "' is not valid JSON");
  return doc;
}

std::vector<std::string> leaf_keys() {
  std::vector<std::string> out;
  const Json doc = default_document();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_object()) {
      out.push_back(it.key());
      continue;
    }
    for (auto kt = it.value().begin(); kt != it.value().end(); ++kt) {
      if (kt.value().is_object()) continue;  // scenario.models
      if (it.key() == "scenario" && kt.key() == "workloads") continue;
      out.push_back(it.key() + "." + kt.key());
    }
  }
  return out;
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError(std::string(assignment), "override must look like key=value");
  apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_override(Json& doc, std::string_view key, std::string_view value) {
  const std::string path(key);
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty() || std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }))
    throw ConfigError(path, "malformed key");

  const Json defaults = default_document();
  const Json* shape = &defaults;
  bool in_models = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (in_models) continue;
    if (!shape->is_object() || !shape->contains(parts[i])) throw ConfigError(path, "unknown key");
    shape = &(*shape)[parts[i]];
    if (i == 1 && parts[0] == "scenario" && parts[1] == "models") in_models = true;
  }
  if (in_models && parts.size() != 4) throw ConfigError(path, "expected scenario.models.<family>.<field>");

  Json parsed = parse_scalar(value);
  if (!in_models) {
    if (shape->is_array() && !parsed.is_array()) {
      Json list = Json::array();
      std::stringstream items{std::string(value)};
      for (std::string item; std::getline(items, item, ',');)
        if (!item.empty()) list.push_back(parse_scalar(item));
      parsed = list;
    } else if (shape->is_string() && !parsed.is_string()) {
      parsed = std::string(value);
    }
  }

  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  Json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Json& next = (*node)[parts[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError(path, "parent is not an object");
    node = &next;
  }
  (*node)[parts.back()] = parsed;
}

RunConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  Json doc = read_document(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return from_json(doc);
}

ScenarioSpec scenario_spec(const ScenarioSource& source, std::uint64_t seed) {
  ScenarioSpec spec;
  switch (source.kind) {
    case ScenarioKind::default_mix:
      spec = default_scenario_spec(seed, source.requested_ttc);
      break;
    case ScenarioKind::word_histogram:
      spec = word_histogram_spec(seed);
      for (auto& e : spec.entries) e.requested_ttc = source.requested_ttc;
      break;
    case ScenarioKind::inline_spec:
      spec.name = "inline";
      spec.entries = source.spec.entries;
      break;
    case ScenarioKind::file:
      throw ConfigError("scenario.kind", "file scenarios are read, not generated");
  }
  spec.seed = seed;
  spec.arrival_spacing = source.spec.arrival_spacing;
  spec.merge_duration = source.spec.merge_duration;
  spec.split_ttc_fraction = source.spec.split_ttc_fraction;
  spec.models = source.spec.models;
  if (!source.name.empty()) spec.name = source.name;
  return spec;
}

Scenario build_scenario(const RunConfig& config, std::uint64_t seed) {
  const ScenarioSource& src = config.scenario;
  if (src.kind == ScenarioKind::file) {
    Json doc;
    try {
      doc = read_document(src.path);
    } catch (const ConfigError& e) {
      throw ConfigError("scenario.path", e.what());
    }
    Scenario s = scenario_from_json(doc);
    if (!src.name.empty()) s.name = src.name;
    return s;
  }
  const ScenarioSpec spec = scenario_spec(src, seed);
  try {
    return generate_scenario(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario", e.what());
  }
}

Json scenario_to_json(const Scenario& scenario) {
  Json workloads = Json::array();
  for (const auto& w : scenario.workloads) {
    Json deadband = Json::object();
    for (const auto& [type, s] : w.deadband) deadband[std::to_string(type)] = s;
    Json tasks = Json::array();
    for (const auto& t : w.tasks) tasks.push_back(Json::array({t.type, t.duration, t.gated}));
    workloads.push_back({{"id", w.id},
                         {"family", to_string(w.family)},
                         {"arrival", w.arrival},
                         {"requested_ttc", w.requested_ttc},
                         {"split_ttc_fraction", w.split_ttc_fraction},
                         {"deadband", deadband},
                         {"tasks", tasks}});
  }
  return Json{{"name", scenario.name}, {"workloads", workloads}};
}

Scenario scenario_from_json(const Json& doc) {
  const Section root(doc, "scenario_file");
  Scenario s;
  s.name = root.string("name");
  const Json& list = root.array("workloads");
  if (list.empty()) throw ConfigError(root.field("workloads"), "must not be empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Section w(list[i], root.field("workloads") + "[" + std::to_string(i) + "]");
    WorkloadSpec spec;
    const std::int64_t id = w.integer("id");
    if (id < 0 || id > std::numeric_limits<int>::max()) throw ConfigError(w.field("id"), "out of range");
    spec.id = static_cast<WorkloadId>(id);
    if (static_cast<std::size_t>(spec.id) != i) throw ConfigError(w.field("id"), "ids must be 0, 1, 2, ... in order");
    spec.family = parse_name<Family>(w, "family", family_from_string);
    spec.arrival = w.non_negative("arrival");
    spec.requested_ttc = w.positive("requested_ttc");
    spec.split_ttc_fraction = w.unit("split_ttc_fraction", true);
    const Section db = w.object("deadband");
    const Json& dbdoc = w.raw("deadband");
    for (auto it = dbdoc.begin(); it != dbdoc.end(); ++it) {
      TypeId type = 0;
      try {
        type = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ConfigError(db.field(it.key()), "type ids must be integers");
      }
      spec.deadband[type] = db.non_negative(it.key());
    }
    const Json& tasks = w.array("tasks");
    if (tasks.empty()) throw ConfigError(w.field("tasks"), "must not be empty");
    for (std::size_t j = 0; j < tasks.size(); ++j) {
      const std::string where = w.field("tasks") + "[" + std::to_string(j) + "]";
      const Json& t = tasks[j];
      if (!t.is_array() || t.size() != 3 || !t[1].is_number() || !t[2].is_boolean())
        throw ConfigError(where, "expected [type, duration, gated]");
      TaskSpec task;
      task.type = static_cast<TypeId>(Section::as_integer(t[0], where));
      task.duration = t[1].get<double>();
      if (!(task.duration > 0.0) || !std::isfinite(task.duration))
        throw ConfigError(where, "duration must be positive");
      task.gated = t[2].get<bool>();
      spec.tasks.push_back(task);
    }
    s.workloads.push_back(std::move(spec));
  }
  return s;
}

}  // namespace spotscale::config
