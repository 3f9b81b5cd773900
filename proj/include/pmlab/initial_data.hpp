#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

#include "pmlab/grid.hpp"

namespace pmlab {

/// u built by cumulative sums so that midpoint gradients equal p exactly.
Field1D field_from_gradient(const Grid1D& grid, const std::function<double(double)>& p, double u_left = 0.0);
Field1D field_from_values(const Grid1D& grid, const std::function<double(double)>& f);

/// Two whitespace-separated columns x, value on a uniform grid.
Field1D load_nodal_file(const std::filesystem::path& path);

/// Builds the datum described by {"preset": name, "params": {...}} or {"file": path}.
///
/// Gradient presets: "ramp" (slope, offset), "sine" (mean, amplitude, center,
/// period), "tanh-front" (low, high, center, width), "plateau" (base, peak,
/// center, width or crossing_halfwidth). Value presets: "bump" (left, right,
/// amplitude). "taylor-counterexample" is two-dimensional and handled by the
/// counterexample scenario.
Field1D build_initial(const nlohmann::json& spec, const Grid1D& grid);

}  // namespace pmlab
