#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace pmlab {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<CriterionResult> criteria;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::string> files;
  std::filesystem::path output_dir;

  bool all_pass() const;
  const CriterionResult* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& scenario_names();
/// Criterion names every report of this scenario carries, in order.
const std::vector<std::string>& criteria_for(const std::string& scenario);

nlohmann::json default_config(const std::string& scenario);
/// Defaults merged with the user config; throws ConfigError naming the field.
nlohmann::json resolve_config(const nlohmann::json& user);

/// PMLAB_OUTPUT_ROOT or the working directory.
std::filesystem::path output_root();
std::filesystem::path resolve_output_dir(const nlohmann::json& config);

ScenarioReport run_scenario(const nlohmann::json& config);

/// Dotted path such as "geometry.r2"; the path must exist in the resolved config.
nlohmann::json set_path(const nlohmann::json& config, const std::string& path, const nlohmann::json& value);
std::vector<double> parse_value_list(const std::string& csv);

/// One run per value, executed concurrently on `workers` threads (0 = hardware).
/// Run i writes to <output_dir>/sweep_<i>; an aggregate sweep.csv goes to <output_dir>.
std::vector<ScenarioReport> run_sweep(const nlohmann::json& base, const std::string& path,
                                      const std::vector<double>& values, int workers = 0);

}  // namespace pmlab
