#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spotscale/domain.hpp"

namespace spotscale {

enum class Family { face_detection, transcoding, feature_extraction, sift_matlab, split_merge };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

// Synthetic task-duration model of one workload family. Durations are
// lognormal with the given mean and coefficient of variation; `deadband` is
// paid once per chunk.
struct TaskModel {
  Family family = Family::face_detection;
  Seconds mean = 1.0;
  double dispersion = 0.0;
  Seconds deadband = 0.0;

  void validate() const;
};

TaskModel default_task_model(Family f);

Seconds sample_task_duration(const TaskModel& model, std::mt19937_64& rng);

struct TaskSpec {
  TypeId type = 0;
  Seconds duration = 0.0;  // ground truth, before transport overhead
  bool gated = false;      // becomes runnable only when every ungated task is done
};

struct WorkloadSpec {
  WorkloadId id = 0;
  Family family = Family::face_detection;
  Seconds arrival = 0.0;
  Seconds requested_ttc = 0.0;
  std::vector<TaskSpec> tasks;
  std::map<TypeId, Seconds> deadband;
  double split_ttc_fraction = 1.0;  // share of the TTC granted to the ungated stage
};

struct Scenario {
  std::string name = "scenario";
  std::vector<WorkloadSpec> workloads;
};

struct WorkloadEntry {
  Family family = Family::face_detection;
  std::int64_t tasks = 1;
  Seconds requested_ttc = 7200.0;
  Seconds arrival = -1.0;  // negative: placed by the arrival spacing
};

struct ScenarioSpec {
  std::string name = "default";
  std::vector<WorkloadEntry> entries;
  Seconds arrival_spacing = 300.0;
  std::uint64_t seed = 7;
  std::map<Family, TaskModel> models;  // overrides of the family defaults
  Seconds merge_duration = 60.0;
  double split_ttc_fraction = 0.9;

  TaskModel model(Family f) const;
  void validate() const;
};

// Inclusive task-count range a family's workloads are drawn from.
std::pair<std::int64_t, std::int64_t> family_task_range(Family f);

// Thirty workloads: eight face detection, eight transcoding (two of them the
// 200- and 300-video spikes), seven feature extraction and seven SIFT, in a
// seeded random order.
ScenarioSpec default_scenario_spec(std::uint64_t seed = 7, Seconds requested_ttc = 7200.0);

// About 14,000 short split tasks followed by one merge.
ScenarioSpec word_histogram_spec(std::uint64_t seed = 7);

Scenario generate_scenario(const ScenarioSpec& spec);

// Split tasks (type 0) run in parallel; one merge task (type 1) is gated on
// all of them.
WorkloadSpec split_merge_workload(WorkloadId id, std::int64_t n_split, const TaskModel& split,
                                  Seconds merge_duration, std::mt19937_64& rng,
                                  double split_ttc_fraction = 0.9);

// Mean ground-truth duration per item, overhead applied.
Seconds true_mean_cus(const WorkloadSpec& w, TypeId type, double transport_overhead);

}  // namespace spotscale
