#include "pmlab/initial_data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

using nlohmann::json;

Field1D field_from_gradient(const Grid1D& grid, const std::function<double(double)>& p, double u_left) {
  Field1D f{grid, std::vector<double>(static_cast<std::size_t>(grid.node_count())), 0.0};
  const double h = grid.spacing();
  f.values[0] = u_left;
  for (int i = 0; i < grid.n_cells; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    f.values[ui + 1] = f.values[ui] + h * p(grid.midpoint(i));
  }
  return f;
}

Field1D field_from_values(const Grid1D& grid, const std::function<double(double)>& fn) {
  Field1D f{grid, std::vector<double>(static_cast<std::size_t>(grid.node_count())), 0.0};
  for (int i = 0; i <= grid.n_cells; ++i) f.values[static_cast<std::size_t>(i)] = fn(grid.node(i));
  return f;
}

Field1D load_nodal_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open initial-data file " + path.string());
  std::vector<double> x, v;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) throw FileError("malformed initial-data row: " + line);
    x.push_back(a);
    v.push_back(b);
  }
  if (x.size() < 9) throw ConfigError("initial.file", "need at least 9 nodes");
  const Grid1D g = Grid1D::make(x.front(), x.back(), static_cast<int>(x.size()) - 1);
  for (int i = 0; i <= g.n_cells; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (std::abs(x[ui] - g.node(i)) > 1e-9 * std::max(1.0, std::abs(g.node(i))))
      throw ConfigError("initial.file", "nodes must be uniformly spaced");
  }
  return Field1D{g, std::move(v), 0.0};
}

namespace {

double param(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw ConfigError(std::string("initial.params.") + key, "must be a number");
  return v.get<double>();
}

}  // namespace

Field1D build_initial(const json& spec, const Grid1D& grid) {
  if (!spec.is_object()) throw ConfigError("initial", "must be an object");
  if (spec.contains("file")) return load_nodal_file(spec.at("file").get<std::string>());
  if (!spec.contains("preset") || !spec.at("preset").is_string())
    throw ConfigError("initial.preset", "missing preset name or file");
  const std::string name = spec.at("preset").get<std::string>();
  const json params = spec.value("params", json::object());
  const double pi = std::numbers::pi;

  if (name == "ramp") {
    const double slope = param(params, "slope", 0.5), offset = param(params, "offset", 0.0);
    return field_from_values(grid, [&](double x) { return offset + slope * (x - grid.a); });
  }
  if (name == "sine") {
    const double mean = param(params, "mean", 0.7), amp = param(params, "amplitude", 0.7);
    const double center = param(params, "center", 0.5 * (grid.a + grid.b));
    const double period = param(params, "period", grid.b - grid.a);
    if (!(period > 0.0)) throw ConfigError("initial.params.period", "must be positive");
    return field_from_gradient(grid, [&](double x) { return mean - amp * std::cos(2.0 * pi * (x - center) / period); });
  }
  if (name == "tanh-front") {
    const double lo = param(params, "low", 0.5), hi = param(params, "high", 1.5);
    const double center = param(params, "center", 0.5 * (grid.a + grid.b));
    const double width = param(params, "width", 0.05);
    if (!(width > 0.0)) throw ConfigError("initial.params.width", "must be positive");
    return field_from_gradient(grid,
                               [&](double x) { return lo + (hi - lo) * 0.5 * (1.0 + std::tanh((x - center) / width)); });
  }
  if (name == "plateau") {
    const double base = param(params, "base", 1.3), peak = param(params, "peak", 0.5);
    const double center = param(params, "center", 0.5 * (grid.a + grid.b));
    double width = param(params, "width", 0.1);
    if (params.contains("crossing_halfwidth")) {
      // place the |p| = 1 crossings at center +- crossing_halfwidth
      const double c = param(params, "crossing_halfwidth", 0.1);
      const double ratio = (base - 1.0) / (base - peak);
      if (!(c > 0.0 && ratio > 0.0 && ratio < 1.0))
        throw ConfigError("initial.params.crossing_halfwidth", "level 1 is not crossed by this plateau");
      width = c / std::pow(-std::log(ratio), 0.25);
    }
    if (!(width > 0.0)) throw ConfigError("initial.params.width", "must be positive");
    return field_from_gradient(grid, [&](double x) {
      const double s = (x - center) / width;
      return base + (peak - base) * std::exp(-s * s * s * s);
    });
  }
  if (name == "bump") {
    const double l = param(params, "left", grid.a + 0.3 * (grid.b - grid.a));
    const double r = param(params, "right", grid.a + 0.7 * (grid.b - grid.a));
    const double amp = param(params, "amplitude", 0.2);
    if (!(l < r)) throw ConfigError("initial.params.left", "need left < right");
    const double pmax = 0.25 * (r - l) * (r - l);
    return field_from_values(grid, [&](double x) {
      if (x <= l || x >= r) return 0.0;
      const double q = (x - l) * (r - x) / pmax;
      return amp * q * q;
    });
  }
  if (name == "taylor-counterexample")
    throw ConfigError("initial.preset", "taylor-counterexample is a 2D patch datum; use the counterexample scenario");
  throw ConfigError("initial.preset", "unknown preset '" + name + "'");
}

}  // namespace pmlab
