#include "spotscale/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spotscale {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::face_detection: return "face_detection";
    case Family::transcoding: return "transcoding";
    case Family::feature_extraction: return "feature_extraction";
    case Family::sift_matlab: return "sift_matlab";
    case Family::split_merge: return "split_merge";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "face_detection") return Family::face_detection;
  if (name == "transcoding") return Family::transcoding;
  if (name == "feature_extraction") return Family::feature_extraction;
  if (name == "sift_matlab") return Family::sift_matlab;
  if (name == "split_merge") return Family::split_merge;
  throw std::invalid_argument("unknown workload family '" + std::string(name) + "'");
}

void TaskModel::validate() const {
  if (!(mean > 0.0)) throw std::invalid_argument("task mean duration must be positive");
  if (dispersion < 0.0) throw std::invalid_argument("task dispersion must be non-negative");
  if (deadband < 0.0) throw std::invalid_argument("task deadband must be non-negative");
}

TaskModel default_task_model(Family f) {
  switch (f) {
    case Family::face_detection: return {f, 5.0, 0.5, 0.0};
    case Family::transcoding: return {f, 120.0, 0.6, 0.0};
    case Family::feature_extraction: return {f, 10.0, 0.4, 0.0};
    case Family::sift_matlab: return {f, 20.0, 0.3, 60.0};
    case Family::split_merge: return {f, 0.45, 0.3, 0.0};
  }
  throw std::invalid_argument("unknown workload family");
}

Seconds sample_task_duration(const TaskModel& model, std::mt19937_64& rng) {
  model.validate();
  if (model.dispersion == 0.0) return model.mean;
  const double sigma_sq = std::log1p(model.dispersion * model.dispersion);
  const double mu = std::log(model.mean) - 0.5 * sigma_sq;
  std::lognormal_distribution<double> dist(mu, std::sqrt(sigma_sq));
  return dist(rng);
}

TaskModel ScenarioSpec::model(Family f) const {
  auto it = models.find(f);
  return it == models.end() ? default_task_model(f) : it->second;
}

void ScenarioSpec::validate() const {
  if (entries.empty()) throw std::invalid_argument("scenario has no workloads");
  if (arrival_spacing < 0.0) throw std::invalid_argument("arrival spacing must be non-negative");
  if (!(split_ttc_fraction > 0.0 && split_ttc_fraction <= 1.0))
    throw std::invalid_argument("split TTC fraction must lie in (0, 1]");
  for (const auto& [f, m] : models) m.validate();
  for (const auto& e : entries) {
    if (e.tasks < 1) throw std::invalid_argument("workload needs at least one task");
    if (!(e.requested_ttc > 0.0)) throw std::invalid_argument("requested TTC must be positive");
  }
}

std::pair<std::int64_t, std::int64_t> family_task_range(Family f) {
  switch (f) {
    case Family::face_detection: return {1, 1000};
    case Family::transcoding: return {1, 300};  // 1-20, plus the 200/300 spikes
    case Family::feature_extraction: return {1, 1000};
    case Family::sift_matlab: return {1, 100};
    case Family::split_merge: return {1, 20000};
  }
  return {1, 1};
}

ScenarioSpec default_scenario_spec(std::uint64_t seed, Seconds requested_ttc) {
  ScenarioSpec spec;
  spec.name = "default";
  spec.seed = seed;
  std::mt19937_64 rng(seed);
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  std::vector<WorkloadEntry> entries;
  for (int i = 0; i < 8; ++i) entries.push_back({Family::face_detection, draw(1, 1000), requested_ttc});
  for (int i = 0; i < 6; ++i) entries.push_back({Family::transcoding, draw(1, 20), requested_ttc});
  entries.push_back({Family::transcoding, 200, requested_ttc});
  entries.push_back({Family::transcoding, 300, requested_ttc});
  for (int i = 0; i < 7; ++i) entries.push_back({Family::feature_extraction, draw(1, 1000), requested_ttc});
  for (int i = 0; i < 7; ++i) entries.push_back({Family::sift_matlab, draw(1, 100), requested_ttc});
  std::shuffle(entries.begin(), entries.end(), rng);
  spec.entries = std::move(entries);
  return spec;
}

ScenarioSpec word_histogram_spec(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.name = "word_histogram";
  spec.seed = seed;
  spec.entries.push_back({Family::split_merge, 14000, 3900.0, 0.0});
  return spec;
}

WorkloadSpec split_merge_workload(WorkloadId id, std::int64_t n_split, const TaskModel& split,
                                  Seconds merge_duration, std::mt19937_64& rng,
                                  double split_ttc_fraction) {
  if (n_split < 1) throw std::invalid_argument("split stage needs at least one task");
  if (!(merge_duration > 0.0)) throw std::invalid_argument("merge duration must be positive");
  WorkloadSpec w;
  w.id = id;
  w.family = Family::split_merge;
  w.split_ttc_fraction = split_ttc_fraction;
  w.tasks.reserve(static_cast<std::size_t>(n_split) + 1);
  for (std::int64_t i = 0; i < n_split; ++i)
    w.tasks.push_back({0, sample_task_duration(split, rng), false});
  w.tasks.push_back({1, merge_duration, true});
  if (split.deadband > 0.0) w.deadband[0] = split.deadband;
  return w;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Scenario out;
  out.name = spec.name;
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  Seconds next_arrival = 0.0;
  WorkloadId id = 0;
  for (const auto& e : spec.entries) {
    const TaskModel m = spec.model(e.family);
    WorkloadSpec w;
    if (e.family == Family::split_merge) {
      w = split_merge_workload(id, e.tasks, m, spec.merge_duration, rng, spec.split_ttc_fraction);
    } else {
      w.id = id;
      w.family = e.family;
      w.tasks.reserve(static_cast<std::size_t>(e.tasks));
      for (std::int64_t i = 0; i < e.tasks; ++i) w.tasks.push_back({0, sample_task_duration(m, rng), false});
      if (m.deadband > 0.0) w.deadband[0] = m.deadband;
    }
    w.arrival = e.arrival >= 0.0 ? e.arrival : next_arrival;
    w.requested_ttc = e.requested_ttc;
    next_arrival = w.arrival + spec.arrival_spacing;
    out.workloads.push_back(std::move(w));
    ++id;
  }
  return out;
}

Seconds true_mean_cus(const WorkloadSpec& w, TypeId type, double transport_overhead) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& t : w.tasks) {
    if (t.type != type) continue;
    sum += t.duration;
    ++n;
  }
  if (n == 0) return 0.0;
  return sum * (1.0 + transport_overhead) / static_cast<double>(n);
}

}  // namespace spotscale
