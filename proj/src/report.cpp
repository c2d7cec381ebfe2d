#include "spotscale/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spotscale::report {
namespace {

void dump_into(std::string& out, const Json& v, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent > 0) out += '\n' + std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_into(out, it.value(), indent, depth + 1);
      }
      pad(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& x : v) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        dump_into(out, x, indent, depth + 1);
      }
      pad(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += fixed(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

std::string opt(const std::optional<double>& x) { return x ? fixed(*x) : std::string(); }

Json id_list(const std::vector<WorkloadId>& ids) {
  Json out = Json::array();
  for (auto id : ids) out.push_back(id);
  return out;
}

}  // namespace

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_interval_csv(std::ostream& out, const SimReport& report) {
  out << kIntervalHeader << '\n';
  for (const auto& r : report.rows)
    out << r.t << ',' << fixed(r.elapsed) << ',' << r.n_tot << ',' << fixed(r.n_star) << ','
        << fixed(r.cum_cost) << ',' << fixed(r.lb_cost) << ',' << r.active_workloads << '\n';
}

void write_workload_csv(std::ostream& out, const SimReport& report) {
  out << kWorkloadHeader << '\n';
  for (const auto& w : report.workloads)
    out << w.id << ',' << to_string(w.family) << ',' << w.tasks << ',' << fixed(w.arrival) << ','
        << fixed(w.requested_ttc) << ',' << fixed(w.confirmed_ttc) << ',' << (w.confirmed ? 1 : 0)
        << ',' << opt(w.completion) << ',' << opt(w.time_to_estimate) << ','
        << fixed(w.estimate_at_init) << ',' << fixed(w.true_cus) << ',' << fixed(w.mae_pct) << ','
        << (w.violated ? 1 : 0) << '\n';
}

void write_event_csv(std::ostream& out, const SimReport& report) {
  out << kEventHeader << '\n';
  for (const auto& e : report.events)
    out << e.workload << ',' << e.task << ',' << e.type << ',' << e.instance << ','
        << fixed(e.start) << ',' << fixed(e.finish) << '\n';
}

std::string dump(const Json& doc, int indent) {
  std::string out;
  dump_into(out, doc, indent, 0);
  out += '\n';
  return out;
}

std::vector<FamilyStats> family_stats(const SimReport& report) {
  std::map<Family, FamilyStats> by;
  for (const auto& w : report.workloads) {
    FamilyStats& s = by[w.family];
    s.family = w.family;
    ++s.workloads;
    if (w.violated) ++s.violations;
    if (!w.time_to_estimate) continue;
    ++s.estimated;
    s.mean_time_to_estimate += *w.time_to_estimate;
    s.mean_mae_pct += w.mae_pct;
  }
  std::vector<FamilyStats> out;
  for (auto& [f, s] : by) {
    if (s.estimated > 0) {
      s.mean_time_to_estimate /= s.estimated;
      s.mean_mae_pct /= s.estimated;
    }
    out.push_back(s);
  }
  return out;
}

Json cell_summary(const experiment::CellResult& cell) {
  Json j;
  j["scenario"] = cell.scenario;
  j["controller"] = to_string(cell.cell.controller);
  j["estimator"] = to_string(cell.cell.estimator);
  j["seed"] = cell.cell.seed;
  j["ttc_s"] = static_cast<double>(cell.ttc);
  if (cell.error) {
    j["error"] = *cell.error;
    return j;
  }
  const SimReport& r = cell.report;
  j["final_cost"] = r.final_cost;
  j["lb_cost"] = r.lb_cost;
  j["charges"] = r.charges;
  j["max_fleet"] = r.max_fleet;
  j["useful_cus"] = r.useful_cus;
  j["busy_seconds"] = r.busy_seconds;
  j["makespan_s"] = r.makespan;
  j["intervals"] = r.rows.size();
  j["workloads"] = r.workloads.size();
  j["violations"] = id_list(r.violations);
  j["incomplete"] = id_list(r.incomplete);
  Json families = Json::array();
  for (const auto& s : family_stats(r))
    families.push_back({{"family", to_string(s.family)},
                        {"workloads", s.workloads},
                        {"estimated", s.estimated},
                        {"mean_time_to_estimate_s", s.mean_time_to_estimate},
                        {"mean_mae_pct", s.mean_mae_pct},
                        {"violations", s.violations}});
  j["families"] = families;
  return j;
}

Json matrix_summary(const std::vector<experiment::CellResult>& cells) {
  Json list = Json::array();
  for (const auto& c : cells) list.push_back(cell_summary(c));
  return Json{{"cells", list}};
}

Json bench_summary(const std::vector<experiment::BenchRow>& rows,
                   const std::vector<experiment::BenchTotal>& totals) {
  Json r = Json::array();
  for (const auto& row : rows)
    r.push_back({{"family", to_string(row.family)},
                 {"estimator", to_string(row.estimator)},
                 {"interval_s", row.interval},
                 {"samples", row.samples},
                 {"unconverged", row.unconverged},
                 {"mean_time_to_estimate_s", row.mean_time_to_estimate},
                 {"mean_mae_pct", row.mean_mae_pct}});
  Json t = Json::array();
  for (const auto& tot : totals)
    t.push_back({{"estimator", to_string(tot.estimator)},
                 {"interval_s", tot.interval},
                 {"samples", tot.samples},
                 {"mean_time_to_estimate_s", tot.mean_time_to_estimate},
                 {"mean_mae_pct", tot.mean_mae_pct}});
  return Json{{"rows", r}, {"totals", t}};
}

void write_bench_csv(std::ostream& out, const std::vector<experiment::BenchRow>& rows) {
  out << "family,estimator,interval_s,samples,unconverged,mean_time_to_estimate_s,mean_mae_pct\n";
  for (const auto& r : rows)
    out << to_string(r.family) << ',' << to_string(r.estimator) << ',' << r.interval << ','
        << r.samples << ',' << r.unconverged << ',' << fixed(r.mean_time_to_estimate) << ','
        << fixed(r.mean_mae_pct) << '\n';
}

std::string cell_dir_name(const experiment::CellResult& cell) {
  return cell.scenario + "_" + std::string(to_string(cell.cell.controller)) + "_" +
         std::string(to_string(cell.cell.estimator)) + "_s" + std::to_string(cell.cell.seed);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_cell(const std::filesystem::path& dir, const experiment::CellResult& cell) {
  std::filesystem::create_directories(dir);
  write_text(dir / "summary.json", dump(cell_summary(cell)));
  if (cell.error) return;
  std::ostringstream intervals, workloads;
  write_interval_csv(intervals, cell.report);
  write_workload_csv(workloads, cell.report);
  write_text(dir / "intervals.csv", intervals.str());
  write_text(dir / "workloads.csv", workloads.str());
  if (!cell.report.events.empty()) {
    std::ostringstream events;
    write_event_csv(events, cell.report);
    write_text(dir / "events.csv", events.str());
  }
}

}  // namespace spotscale::report
