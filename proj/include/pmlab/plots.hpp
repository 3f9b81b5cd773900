#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pmlab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;

  std::string render_svg() const;
};

/// z is row-major over (ys, xs).
struct Heatmap {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> z;

  std::string render_svg() const;
};

/// Renders every plot listed in a scenario manifest; returns the SVG paths.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& manifest);

}  // namespace pmlab
