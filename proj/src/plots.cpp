#include "pmlab/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "pmlab/errors.hpp"
#include "pmlab/io.hpp"

namespace pmlab {

namespace {

constexpr double W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 55;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-300) {
      const double pad = std::max(1e-12, std::abs(lo) * 0.05);
      lo -= pad;
      hi += pad;
    }
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<')
      o += "&lt;";
    else if (c == '>')
      o += "&gt;";
    else if (c == '&')
      o += "&amp;";
    else
      o += c;
  }
  return o;
}

void frame(std::ostringstream& o, const std::string& title, const std::string& xl, const std::string& yl,
           const Range& xr, const Range& yr) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << escape(title) << "</text>\n";
  o << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR << "\" height=\"" << H - MT - MB
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = k / 4.0;
    const double px = ML + fx * (W - ML - MR);
    const double py = H - MB - fx * (H - MT - MB);
    o << "<line x1=\"" << px << "\" y1=\"" << H - MB << "\" x2=\"" << px << "\" y2=\"" << H - MB + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px << "\" y=\"" << H - MB + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(xr.lo + fx * (xr.hi - xr.lo))
      << "</text>\n";
    o << "<line x1=\"" << ML - 5 << "\" y1=\"" << py << "\" x2=\"" << ML << "\" y2=\"" << py
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ML - 8 << "\" y=\"" << py + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(yr.lo + fx * (yr.hi - yr.lo))
      << "</text>\n";
  }
  o << "<text x=\"" << ML + (W - ML - MR) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xl) << "</text>\n";
  o << "<text transform=\"translate(16," << MT + (H - MT - MB) / 2
    << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(yl)
    << "</text>\n";
}

}  // namespace

std::string LinePlot::render_svg() const {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  std::ostringstream o;
  frame(o, title, xlabel, ylabel, xr, yr);
  auto px = [&](double x) { return ML + (x - xr.lo) / (xr.hi - xr.lo) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - yr.lo) / (yr.hi - yr.lo) * (H - MT - MB); };
  int legend = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      any = true;
    }
    if (any)
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = MT + 14 + 16 * legend++;
      o << "<line x1=\"" << W - MR - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - MR - 130 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      o << "<text x=\"" << W - MR - 125 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string Heatmap::render_svg() const {
  Range xr, yr, zr;
  for (double v : xs) xr.add(v);
  for (double v : ys) yr.add(v);
  xr.finish();
  yr.finish();
  double zmax = 0.0;
  for (double v : z)
    if (std::isfinite(v)) zmax = std::max(zmax, std::abs(v));
  std::ostringstream o;
  frame(o, title, xlabel, ylabel, xr, yr);
  const std::size_t nx = xs.size(), ny = ys.size();
  if (nx > 0 && ny > 0 && z.size() == nx * ny) {
    const double cw = (W - ML - MR) / static_cast<double>(nx);
    const double ch = (H - MT - MB) / static_cast<double>(ny);
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double v = z[j * nx + i];
        std::string fill = "#cccccc";
        if (std::isfinite(v) && zmax > 0.0) {
          // signed log scale so tiny positive margins stay visible
          const double s = std::log1p(std::abs(v) / zmax * 1e3) / std::log1p(1e3);
          const int c = static_cast<int>(255.0 * (1.0 - s));
          std::ostringstream f;
          if (v >= 0.0)
            f << "rgb(" << c << ',' << c << ",255)";
          else
            f << "rgb(255," << c << ',' << c << ')';
          fill = f.str();
        }
        o << "<rect x=\"" << ML + i * cw << "\" y=\"" << H - MB - (j + 1) * ch << "\" width=\"" << cw + 0.5
          << "\" height=\"" << ch + 0.5 << "\" fill=\"" << fill << "\"/>\n";
      }
    }
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

void save(const std::filesystem::path& p, const std::string& svg) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FileError("cannot write " + p.string());
  out << svg;
}

std::size_t column(const CsvTable& t, const std::string& name, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw FileError("column '" + name + "' missing in " + path.string());
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& manifest_path) {
  const auto manifest = read_json(manifest_path);
  const auto base = manifest_path.parent_path();
  std::vector<std::filesystem::path> out;
  if (!manifest.contains("plots")) return out;
  for (const auto& spec : manifest.at("plots")) {
    const std::string kind = spec.at("kind").get<std::string>();
    const auto csv_path = base / spec.at("csv").get<std::string>();
    const auto svg_path = base / spec.value("output", kind + ".svg");
    if (!std::filesystem::exists(csv_path)) throw FileError("missing CSV " + csv_path.string());
    const CsvTable t = read_csv(csv_path);

    if (kind == "fronts") {
      LinePlot plot{spec.value("title", "front positions"), "t", "front position", {}};
      const auto ci = column(t, "front", csv_path), ti = column(t, "t", csv_path), ai = column(t, "alpha", csv_path);
      std::map<int, Series> fronts;
      double tmax = 0.0;
      for (const auto& row : t.rows) {
        auto& s = fronts[static_cast<int>(row[ci])];
        s.x.push_back(row[ti]);
        s.y.push_back(row[ai]);
        tmax = std::max(tmax, row[ti]);
      }
      for (auto& [id, s] : fronts) {
        s.label = "front " + std::to_string(id);
        s.color = palette[static_cast<std::size_t>(id) % 4];
        plot.series.push_back(std::move(s));
      }
      if (spec.contains("cone") && !t.rows.empty()) {
        const auto& c = spec.at("cone");
        const double r1 = c.at("r1"), r2 = c.at("r2"), r3 = c.at("r3"), r4 = c.at("r4"), k0 = c.at("k0");
        Series lo{"cone", {}, {}, "#555555", true}, hi{"", {}, {}, "#555555", true};
        for (int k = 0; k <= 100; ++k) {
          const double tt = tmax * k / 100.0;
          lo.x.push_back(tt);
          lo.y.push_back(std::max(r1, r3 - k0 * tt));
          hi.x.push_back(tt);
          hi.y.push_back(std::min(r2, r4 + k0 * tt));
        }
        plot.series.push_back(std::move(lo));
        plot.series.push_back(std::move(hi));
      }
      save(svg_path, plot.render_svg());
    } else if (kind == "supgrad") {
      LinePlot plot{spec.value("title", "sup gradient"), "t", "M(t)", {}};
      const auto ti = column(t, "t", csv_path), mi = column(t, "M", csv_path), bi = column(t, "bound", csv_path);
      Series m{"M(t)", {}, {}, palette[0], false}, b{"lower bound", {}, {}, palette[1], true};
      for (const auto& row : t.rows) {
        m.x.push_back(row[ti]);
        m.y.push_back(row[mi]);
        b.x.push_back(row[ti]);
        b.y.push_back(row[bi]);
      }
      plot.series = {m, b};
      save(svg_path, plot.render_svg());
    } else if (kind == "barrier_heatmap") {
      Heatmap hm{spec.value("title", "barrier margin"), "x", "t", {}, {}, {}};
      const auto xi = column(t, "x", csv_path), ti = column(t, "t", csv_path), mi = column(t, "margin", csv_path);
      std::map<double, std::map<double, double>> grid;
      for (const auto& row : t.rows) grid[row[ti]][row[xi]] = row[mi];
      for (const auto& [tt, rowmap] : grid) {
        hm.ys.push_back(tt);
        if (hm.xs.empty())
          for (const auto& [xx, v] : rowmap) hm.xs.push_back(xx);
        for (double xx : hm.xs) {
          const auto it = rowmap.find(xx);
          hm.z.push_back(it == rowmap.end() ? std::nan("") : it->second);
        }
      }
      save(svg_path, hm.render_svg());
    } else {
      throw ConfigError("plots.kind", "unknown plot kind '" + kind + "'");
    }
    out.push_back(svg_path);
  }
  return out;
}

}  // namespace pmlab
