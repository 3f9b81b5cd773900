#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmlab/barriers.hpp"
#include "pmlab/region_tracker.hpp"
#include "pmlab/solvers.hpp"

namespace pmlab {

/// Shortest round-trip decimal, '.' separator, independent of locale.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Columns t, x_0, ..., x_N.
CsvTable trajectory_table(const Trajectory& traj);
nlohmann::json run_summary(const Trajectory& traj);

nlohmann::json to_json(const InclusionReport& r);
nlohmann::json to_json(const ExpansionReport& r);
nlohmann::json to_json(const SupGradReport& r);
nlohmann::json to_json(const BarrierReport& r);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const RegionSnapshot& r);

}  // namespace pmlab
