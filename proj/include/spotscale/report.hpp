#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spotscale/cloudsim.hpp"
#include "spotscale/experiment.hpp"

namespace spotscale::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kIntervalHeader =
    "t,elapsed_s,n_tot,n_star,cum_cost,lb_cost,active_workloads";
inline constexpr const char* kWorkloadHeader =
    "id,family,tasks,arrival_s,requested_ttc_s,confirmed_ttc_s,confirmed,completion_s,"
    "time_to_estimate_s,estimate_at_init,true_cus,mae_pct,violated";
inline constexpr const char* kEventHeader = "workload,task,type,instance,start_s,finish_s";

// Six decimals, never "-0.000000".
std::string fixed(double x);

void write_interval_csv(std::ostream& out, const SimReport& report);
void write_workload_csv(std::ostream& out, const SimReport& report);
void write_event_csv(std::ostream& out, const SimReport& report);

// JSON text in which every floating-point number carries exactly six decimals.
std::string dump(const Json& doc, int indent = 2);

// Mean time-to-estimate and MAE of one family's confirmed workloads.
struct FamilyStats {
  Family family = Family::face_detection;
  int workloads = 0;
  int estimated = 0;
  double mean_time_to_estimate = 0.0;
  double mean_mae_pct = 0.0;
  int violations = 0;
};

std::vector<FamilyStats> family_stats(const SimReport& report);

Json cell_summary(const experiment::CellResult& cell);
// One entry per cell plus the lower bound of every scenario seed.
Json matrix_summary(const std::vector<experiment::CellResult>& cells);
Json bench_summary(const std::vector<experiment::BenchRow>& rows,
                   const std::vector<experiment::BenchTotal>& totals);
void write_bench_csv(std::ostream& out, const std::vector<experiment::BenchRow>& rows);

// Directory name of one cell: <scenario>_<controller>_<estimator>_s<seed>.
std::string cell_dir_name(const experiment::CellResult& cell);

// Writes intervals.csv, workloads.csv, summary.json (and events.csv when
// events were recorded) into `dir`.
void write_cell(const std::filesystem::path& dir, const experiment::CellResult& cell);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace spotscale::report
