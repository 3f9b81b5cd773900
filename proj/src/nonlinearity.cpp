#include "pmlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr int stencil_half[4] = {0, 2, 2, 3};

}  // namespace

struct NonlinearityProfile::Table {
  double s0 = 0.0;
  double ds = 0.0;
  std::vector<double> d[4];

  std::size_t size() const { return d[0].size(); }
  double node(std::size_t i) const { return s0 + ds * static_cast<double>(i); }

  std::pair<double, double> range(int order) const {
    const auto hw = static_cast<std::size_t>(stencil_half[order]);
    return {node(hw), node(size() - 1 - hw)};
  }

  double eval(double s, int order) const {
    const auto [lo, hi] = range(order);
    const double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (!(s >= lo - slack && s <= hi + slack)) {
      std::ostringstream msg;
      msg << "sigma " << s << " outside sampled range [" << lo << ", " << hi << "] for order " << order;
      throw RangeError(msg.str());
    }
    const auto hw = static_cast<std::ptrdiff_t>(stencil_half[order]);
    const auto last = static_cast<std::ptrdiff_t>(size()) - 1 - hw;
    const double x = (s - s0) / ds;
    auto j0 = static_cast<std::ptrdiff_t>(std::floor(x)) - 1;
    j0 = std::clamp(j0, hw, last - 3);
    // 4-point Lagrange interpolation of the node table
    const auto& f = d[order];
    double out = 0.0;
    for (std::ptrdiff_t a = 0; a < 4; ++a) {
      double w = 1.0;
      for (std::ptrdiff_t b = 0; b < 4; ++b) {
        if (b == a) continue;
        w *= (x - static_cast<double>(j0 + b)) / static_cast<double>(a - b);
      }
      out += w * f[static_cast<std::size_t>(j0 + a)];
    }
    return out;
  }
};

NonlinearityProfile NonlinearityProfile::perona_malik() {
  NonlinearityProfile p;
  p.kind_ = ProfileKind::ConcretePM;
  p.name_ = "pm";
  p.cache_constants();
  return p;
}

NonlinearityProfile NonlinearityProfile::tabulated(std::vector<double> sigma, std::vector<double> phi,
                                                   std::string name) {
  if (sigma.size() != phi.size()) throw ConfigError("profile", "sigma and phi sample counts differ");
  if (sigma.size() < 16) throw ConfigError("profile", "need at least 16 samples");
  for (double v : sigma)
    if (!std::isfinite(v)) throw ConfigError("profile", "non-finite sigma sample");
  for (double v : phi)
    if (!std::isfinite(v)) throw ConfigError("profile", "non-finite phi sample");

  const double ds = (sigma.back() - sigma.front()) / static_cast<double>(sigma.size() - 1);
  if (!(ds > 0.0)) throw ConfigError("profile", "sigma samples must be ascending");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const double expect = sigma.front() + ds * static_cast<double>(i);
    if (std::abs(sigma[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw ConfigError("profile", "sigma samples must be uniformly spaced");
  }

  // samples starting at 0 are mirrored by evenness
  std::vector<double> f;
  double s0 = sigma.front();
  if (std::abs(sigma.front()) <= 1e-12 * ds) {
    const std::size_t n = sigma.size();
    f.reserve(2 * n - 1);
    for (std::size_t i = n - 1; i >= 1; --i) f.push_back(phi[i]);
    f.insert(f.end(), phi.begin(), phi.end());
    s0 = -sigma.back();
  } else {
    f = std::move(phi);
  }

  auto table = std::make_shared<Table>();
  table->s0 = s0;
  table->ds = ds;
  const std::size_t n = f.size();
  for (auto& col : table->d) col.assign(n, nan);
  table->d[0] = f;
  const double h1 = 12.0 * ds, h2 = 12.0 * ds * ds, h3 = 8.0 * ds * ds * ds;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    table->d[1][i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / h1;
    table->d[2][i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / h2;
  }
  for (std::size_t i = 3; i + 3 < n; ++i) {
    table->d[3][i] = (-f[i + 3] + 8.0 * f[i + 2] - 13.0 * f[i + 1] + 13.0 * f[i - 1] - 8.0 * f[i - 2] +
                      f[i - 3]) /
                     h3;
  }

  NonlinearityProfile p;
  p.kind_ = ProfileKind::Tabulated;
  p.name_ = std::move(name);
  p.table_ = std::move(table);
  p.cache_constants();
  return p;
}

NonlinearityProfile NonlinearityProfile::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open profile file " + path.string());
  std::vector<double> s, f;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) throw FileError("malformed profile row: " + line);
    s.push_back(a);
    f.push_back(b);
  }
  return tabulated(std::move(s), std::move(f), path.filename().string());
}

NonlinearityProfile NonlinearityProfile::from_spec(const std::string& spec) {
  if (spec == "pm") return perona_malik();
  return from_file(spec);
}

void NonlinearityProfile::cache_constants() {
  auto safe = [this](double s, int order) {
    try {
      return phi(s, order);
    } catch (const RangeError&) {
      return nan;
    }
  };
  dphi1_ = safe(1.0, 1);
  dphi3_ = safe(1.0, 3);
  ddphi0_ = safe(0.0, 2);
}

double NonlinearityProfile::phi(double s, int order) const {
  if (order < 0 || order > 3) throw DomainError("derivative order must be in 0..3");
  if (kind_ == ProfileKind::Tabulated) return table_->eval(s, order);
  const double q = 1.0 + s * s;
  switch (order) {
    case 0:
      return 0.5 * std::log1p(s * s);
    case 1:
      return s / q;
    case 2:
      return (1.0 - s * s) / (q * q);
    default:
      return -2.0 * s * (3.0 - s * s) / (q * q * q);
  }
}

std::pair<double, double> NonlinearityProfile::range(int order) const {
  if (order < 0 || order > 3) throw DomainError("derivative order must be in 0..3");
  if (kind_ == ProfileKind::ConcretePM) {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }
  return table_->range(order);
}

double eval_phi(const NonlinearityProfile& profile, double sigma, int order) {
  return profile.phi(sigma, order);
}

HypothesisReport check_hypotheses(const NonlinearityProfile& profile, int sample_count) {
  if (sample_count < 16) throw DomainError("sample_count must be at least 16");
  const double ninf = -std::numeric_limits<double>::infinity();
  HypothesisReport rep;
  const auto [lo2, hi2] = profile.range(2);
  const double smax = profile.kind() == ProfileKind::ConcretePM ? 10.0 : hi2;
  const double n = static_cast<double>(sample_count);

  auto guarded = [&](double s, int order) {
    try {
      return profile.phi(s, order);
    } catch (const RangeError&) {
      return nan;
    }
  };

  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sample_count; ++j) {
    const double v = guarded(j / n, 2);
    m = std::isfinite(v) ? std::min(m, v) : ninf;
  }
  rep.phi_plus = {m > hypothesis_margin, m};

  const double at1 = guarded(1.0, 2);
  rep.phi_zero = {std::isfinite(at1) && std::abs(at1) <= hypothesis_margin,
                  std::isfinite(at1) ? hypothesis_margin - std::abs(at1) : ninf};

  m = std::numeric_limits<double>::infinity();
  if (!(smax > 1.0)) m = ninf;
  for (int j = 1; j <= sample_count && smax > 1.0; ++j) {
    const double v = guarded(1.0 + j * (smax - 1.0) / n, 2);
    m = std::isfinite(v) ? std::min(m, -v) : ninf;
  }
  rep.phi_minus = {m > hypothesis_margin, m};

  const double t1 = profile.d3phi_critical();
  rep.phi_triple = {std::isfinite(t1) && -t1 > hypothesis_margin, std::isfinite(t1) ? -t1 : ninf};

  const auto [lo0, hi0] = profile.range(0);
  const double emax = std::min({smax, hi0, -lo0});
  bool even = emax > 0.0;
  for (int j = 0; j <= sample_count && even; ++j) {
    const double s = emax * j / n;
    const double a = profile.phi(s, 0), b = profile.phi(-s, 0);
    if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) even = false;
  }
  const double d10 = guarded(0.0, 1);
  rep.even = even && std::isfinite(d10) && std::abs(d10) <= hypothesis_margin;
  return rep;
}

double truncated_flux_h(const NonlinearityProfile& profile, double sigma) {
  if (sigma >= 1.0) return profile.dphi_critical();
  if (sigma >= 0.0) return profile.d1(sigma);
  const double c = profile.d2phi_zero();
  if (sigma <= -0.5) return -0.25 * c;
  return c * (sigma + 0.5) * (sigma + 0.5) - 0.25 * c;
}

namespace {

void require_open(const NonlinearityProfile& profile, double y, const char* what) {
  const double cap = profile.dphi_critical();
  if (!(y > 0.0 && y < cap)) {
    std::ostringstream msg;
    msg << what << " argument " << y << " outside (0, " << cap << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double h_inverse_bisect(const NonlinearityProfile& profile, double y) {
  require_open(profile, y, "h_inverse");
  double lo = 0.0, hi = 1.0;
  // run to machine resolution; tol_root is met long before
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (truncated_flux_h(profile, mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double h_inverse(const NonlinearityProfile& profile, double y) {
  if (profile.kind() != ProfileKind::ConcretePM) return h_inverse_bisect(profile, y);
  require_open(profile, y, "h_inverse");
  return 2.0 * y / (1.0 + std::sqrt((1.0 - 2.0 * y) * (1.0 + 2.0 * y)));
}

double coeff_g_closed_pm(double s) {
  const double q = s - s * s;
  return std::sqrt(q) + 2.0 * q;
}

double coeff_g_generic(const NonlinearityProfile& profile, double s) {
  require_open(profile, s, "g");
  return profile.d2(h_inverse_bisect(profile, profile.dphi_critical() - s));
}

double coeff_g(const NonlinearityProfile& profile, double s) {
  if (profile.kind() != ProfileKind::ConcretePM) return coeff_g_generic(profile, s);
  require_open(profile, s, "g");
  return coeff_g_closed_pm(s);
}

DerivedConstants constants(const NonlinearityProfile& profile, double r2) {
  if (!(r2 > 0.0)) throw DomainError("r2 must be positive");
  const double d1 = profile.dphi_critical();
  const double d3 = profile.d3phi_critical();
  if (!(d3 < -hypothesis_margin)) throw HypothesisError("phi'''(1) must be negative");
  if (!(d1 > 0.0)) throw HypothesisError("phi'(1) must be positive");
  DerivedConstants c;
  c.r2 = r2;
  c.G = std::sqrt(2.0 * std::abs(d3));
  c.A = d1 / (r2 * r2);
  c.k0 = c.G * std::sqrt(c.A);
  return c;
}

}  // namespace pmlab
