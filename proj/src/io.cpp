#include "pmlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  std::string line;
  for (const auto& row : table.rows) {
    line.clear();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += format_double(row[i]);
    }
    line += '\n';
    out << line;
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("missing CSV " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) {
        if (cell == "nan")
          v = std::nan("");
        else if (cell == "inf" || cell == "-inf")
          v = cell[0] == '-' ? -INFINITY : INFINITY;
        else
          throw FileError("malformed CSV cell '" + cell + "' in " + path.string());
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.header.push_back("t");
  if (traj.snapshots.empty()) return t;
  const int n = traj.snapshots.front().grid.node_count();
  for (int i = 0; i < n; ++i) t.header.push_back("x_" + std::to_string(i));
  for (const auto& s : traj.snapshots) {
    std::vector<double> row;
    row.reserve(s.values.size() + 1);
    row.push_back(s.time);
    row.insert(row.end(), s.values.begin(), s.values.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json run_summary(const Trajectory& traj) {
  json j;
  j["model"] = to_string(traj.model);
  j["profile"] = traj.profile_name;
  if (!traj.snapshots.empty()) {
    const auto& g = traj.snapshots.front().grid;
    j["grid"] = {{"a", g.a}, {"b", g.b}, {"n_cells", g.n_cells}, {"spacing", g.spacing()}};
    j["t_final"] = traj.snapshots.back().time;
  }
  j["snapshots"] = traj.snapshots.size();
  j["total_steps"] = traj.total_steps;
  j["breakdown"] = traj.breakdown;
  j["breakdown_time"] = traj.breakdown ? json(traj.breakdown_time) : json(nullptr);
  j["breakdown_reason"] = traj.breakdown_reason;
  json hist = json::array();
  for (const auto& r : traj.dt_history)
    hist.push_back({{"t_begin", r.t_begin}, {"t_end", r.t_end}, {"steps", r.steps}, {"dt_min", r.dt_min},
                    {"dt_max", r.dt_max}});
  j["dt_history"] = hist;
  return j;
}

json to_json(const InclusionReport& r) {
  return {{"holds", r.holds},   {"worst_violation", r.worst_violation}, {"worst_s", r.worst_s},
          {"worst_t", r.worst_t}, {"pairs_checked", r.pairs_checked}};
}

json to_json(const ExpansionReport& r) {
  return {{"vacuous", r.vacuous},
          {"containment_holds", r.containment_holds},
          {"worst_violation", r.worst_violation},
          {"worst_time", r.worst_time},
          {"invaded", r.invaded},
          {"invasion_time", r.invaded ? json(r.invasion_time) : json(nullptr)},
          {"predicted_invasion_time", finite_or_null(r.predicted_invasion_time)},
          {"mean_outward_speed", r.mean_outward_speed},
          {"left_speed", r.left_speed},
          {"right_speed", r.right_speed}};
}

json to_json(const SupGradReport& r) {
  return {{"holds", r.holds}, {"worst_margin", finite_or_null(r.worst_margin)}, {"samples", r.samples.size()}};
}

json to_json(const BarrierReport& r) {
  json j;
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = finite_or_null(v);
  j["parameters"] = params;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"checked", c.checked}, {"pass", c.pass}, {"margin", finite_or_null(c.margin)}});
  j["checks"] = checks;
  j["all_pass"] = r.all_pass();
  j["min_margin"] = finite_or_null(r.min_margin());
  j["notes"] = r.notes;
  return j;
}

json to_json(const ComparisonReport& r) {
  return {{"setup_ok", r.setup_ok},
          {"holds", r.holds},
          {"tolerance", r.tolerance},
          {"worst_margin", finite_or_null(r.worst_margin)},
          {"worst_x", r.worst_x},
          {"worst_t", r.worst_t},
          {"nodes_checked", r.nodes_checked}};
}

json to_json(const RegionSnapshot& r) {
  json iv = json::array();
  for (const auto& i : r.intervals) iv.push_back({i.left, i.right});
  return {{"time", r.time}, {"intervals", iv}};
}

}  // namespace pmlab
