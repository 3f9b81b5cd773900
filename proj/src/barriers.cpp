#include "pmlab/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double dpsi(double x5, double x6, double x) { return x5 + x6 - 2.0 * x; }

// linear interpolation of nodal values; NaN outside the grid
double sample(const Field1D& f, double x) {
  const Grid1D& g = f.grid;
  if (x < g.a - 1e-12 || x > g.b + 1e-12) return nan;
  const double s = std::clamp((x - g.a) / g.spacing(), 0.0, static_cast<double>(g.n_cells));
  const int i = std::min(static_cast<int>(s), g.n_cells - 1);
  const double th = s - i;
  const auto ui = static_cast<std::size_t>(i);
  return (1.0 - th) * f.values[ui] + th * f.values[ui + 1];
}

std::vector<double> time_samples(double horizon) {
  std::vector<double> t{0.0};
  if (horizon > 0.0)
    for (int j = 1; j <= 4; ++j) t.push_back(horizon * j / 4.0);
  return t;
}

struct MinTracker {
  double value = inf;
  void add(double v) { value = std::isnan(v) ? -inf : std::min(value, v); }
};

CheckItem item(const std::string& name, double margin, bool strict = true) {
  const bool ok = strict ? margin > 0.0 : margin >= 0.0;
  return CheckItem{name, ok && std::isfinite(margin), margin, true};
}

double g_or_nan(const NonlinearityProfile& p, double w) {
  if (!(w > 0.0 && w < p.dphi_critical())) return nan;
  return coeff_g(p, w);
}

}  // namespace

bool ConeSet::in_cone(double r, double t) const {
  return t >= 0.0 && r >= r1 && r <= r2 && r >= r3 - k0 * t && r <= r4 + k0 * t;
}

bool ConeSet::in_window(double r, double t) const {
  return t >= 0.0 && t <= t_star && r >= r5 + k * t && r <= r6 + k * t;
}

bool ConeSet::window_inside_cone() const {
  return in_cone(r5, 0.0) && in_cone(r6, 0.0) && in_cone(r5 + k * t_star, t_star) &&
         in_cone(r6 + k * t_star, t_star);
}

double eval_psi(double x5, double x6, double x) { return (x - x5) * (x6 - x); }

BarrierValues eval_w1(const BarrierFBP1& b, double x, double t) {
  const double psi = eval_psi(b.x5, b.x6, x);
  const double dp = dpsi(b.x5, b.x6, x);
  const double e = std::exp(-b.lambda * t);
  const double d = b.delta;
  BarrierValues out;
  out.w = e * (d * d * psi + d * psi * psi);
  out.w_t = -b.lambda * out.w;
  out.w_x = e * (d * d * dp + 2.0 * d * psi * dp);
  out.w_xx = e * (2.0 * d * dp * dp - 4.0 * d * psi - 2.0 * d * d);
  return out;
}

BarrierValues eval_w2(const BarrierFBP2& b, double r, double t) {
  const double y = r - b.k * t;
  const double slack = 1e-12 * std::max(1.0, std::abs(b.r6));
  if (y < b.r5 - slack || y > b.r6 + slack) {
    std::ostringstream msg;
    msg << "y = r - k t = " << y << " outside [" << b.r5 << ", " << b.r6 << "]";
    throw RangeError(msg.str());
  }
  const double psi = std::max(0.0, eval_psi(b.r5, b.r6, y));
  const double sp = std::sqrt(psi);
  const double dp = dpsi(b.r5, b.r6, y);
  const double d = b.delta, d3 = d * d * d;
  BarrierValues out;
  out.w = d3 * psi + d * psi * sp;
  out.w_x = d3 * dp + 1.5 * d * sp * dp;
  out.w_t = -b.k * out.w_x;
  out.w_xx = sp > 0.0 ? -2.0 * d3 - 3.0 * d * sp + 0.75 * d * dp * dp / sp : nan;
  return out;
}

LambdaSelection select_lambda_detail(const BarrierFBP1& b, const NonlinearityProfile& profile, double horizon) {
  if (!(b.x5 < b.x7 && b.x7 < b.x8 && b.x8 < b.x6)) throw SelectionError("need x5 < x7 < x8 < x6");
  if (!(b.delta > 0.0)) throw SelectionError("delta must be positive");
  LambdaSelection sel;
  auto sup_at = [&](double scale, double* arg) {
    double best = -inf;
    for (int i = 0; i < lambda_samples; ++i) {
      const double x = b.x7 + (b.x8 - b.x7) * i / (lambda_samples - 1.0);
      const double psi = eval_psi(b.x5, b.x6, x);
      const double w = scale * (b.delta * b.delta * psi + b.delta * psi * psi);
      if (!(w > 0.0 && w < profile.dphi_critical()))
        throw SelectionError("w leaves the domain of g on [x7, x8]; delta too large");
      const double v = coeff_g(profile, w) * (4.0 * psi + 2.0 * b.delta) / (b.delta * psi + psi * psi);
      if (!std::isfinite(v)) throw SelectionError("supremum not finite on samples");
      if (v > best) {
        best = v;
        if (arg) *arg = x;
      }
    }
    return best;
  };
  sel.sup_t0 = sup_at(1.0, &sel.argmax);
  sel.lambda = lambda_safety * sel.sup_t0;
  if (horizon > 0.0) {
    sel.sup_tT = sup_at(std::exp(-sel.lambda * horizon), nullptr);
    sel.t_sample_exceeds = sel.sup_tT > sel.sup_t0;
  }
  return sel;
}

double select_lambda(const BarrierFBP1& partial, const NonlinearityProfile& profile) {
  return select_lambda_detail(partial, profile).lambda;
}

bool BarrierReport::all_pass() const {
  for (const auto& c : checks)
    if (c.checked && !c.pass) return false;
  return !checks.empty();
}

double BarrierReport::min_margin() const {
  double m = inf;
  for (const auto& c : checks)
    if (c.checked) m = std::min(m, c.margin);
  return m;
}

const CheckItem* BarrierReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

BarrierReport verify_w1(const BarrierFBP1& b, const NonlinearityProfile& profile, int resolution, double horizon,
                        const Field1D* v0) {
  if (resolution < 8) throw DomainError("resolution must be at least 8");
  BarrierReport rep;
  rep.parameters = {{"x5", b.x5}, {"x6", b.x6}, {"x7", b.x7}, {"x8", b.x8},
                    {"delta", b.delta}, {"lambda", b.lambda}, {"horizon", horizon}};
  const double c0 = profile.dphi_critical();
  const double L = b.x6 - b.x5;
  const auto ts = time_samples(horizon);

  MinTracker w2, w3, w4, w6, ineq, ineq_end, ineq_mid;
  for (double t : ts) {
    w3.add(eval_w1(b, b.x5, t).w_x);
    w4.add(-eval_w1(b, b.x6, t).w_x);
    for (int i = 1; i < resolution; ++i) {
      const double x = b.x5 + L * i / resolution;
      const auto v = eval_w1(b, x, t);
      w2.add(v.w);
      w6.add(c0 - v.w);
      const double m = g_or_nan(profile, v.w) * v.w_xx - v.w_t;
      ineq.add(m);
      if (x >= b.x7 && x <= b.x8)
        ineq_mid.add(m);
      else
        ineq_end.add(m);
    }
  }
  rep.checks.push_back(item("w2_positive", w2.value));
  rep.checks.push_back(item("w3_left_slope", w3.value));
  rep.checks.push_back(item("w4_right_slope", w4.value));
  if (v0) {
    MinTracker w5;
    for (int i = 0; i <= resolution; ++i) {
      const double x = b.x5 + L * i / resolution;
      w5.add(sample(*v0, x) - eval_w1(b, x, 0.0).w);
    }
    rep.checks.push_back(item("w5_initial_below", w5.value));
  } else {
    rep.checks.push_back(CheckItem{"w5_initial_below", false, 0.0, false});
  }
  rep.checks.push_back(item("w6_below_c0", w6.value));
  rep.checks.push_back(item("inequality", ineq.value));
  rep.checks.push_back(item("inequality_endpoint_regime", ineq_end.value));
  rep.checks.push_back(item("inequality_middle_regime", ineq_mid.value));
  return rep;
}

EpsilonSelection select_eps0_c2(const NonlinearityProfile& profile, double k, double A) {
  const double d3 = profile.d3phi_critical();
  if (!(d3 < -hypothesis_margin)) throw HypothesisError("phi'''(1) must be negative");
  if (!(A > 0.0)) throw DomainError("A must be positive");
  const double G = std::sqrt(2.0 * std::abs(d3));
  const double ak = std::abs(k);
  if (!(ak < G * std::sqrt(A))) {
    std::ostringstream msg;
    msg << "|k| = " << ak << " is not below G sqrt(A) = " << G * std::sqrt(A);
    throw ConeError(msg.str());
  }
  const double E = std::min({1.0, G, 0.5 * A});
  auto m = [&](double e) { return (1.0 - e) * (G - e) * std::sqrt(std::max(0.0, A - 2.0 * e)) - ak; };
  EpsilonSelection sel;
  if (m(E) >= 0.0) {
    sel.eps_root = E;
    sel.eps0 = 0.5 * E;
  } else {
    double lo = 0.0, hi = E;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (m(mid) > 0.0 ? lo : hi) = mid;
    }
    sel.eps_root = lo;
    sel.eps0 = 0.5 * lo;
  }

  const double c0 = profile.dphi_critical();
  const double slope = G - sel.eps0;
  int first_fail = c2_samples;
  for (int j = 1; j < c2_samples; ++j) {
    const double s = c0 * j / c2_samples;
    if (coeff_g(profile, s) < slope * std::sqrt(s)) {
      first_fail = j;
      break;
    }
  }
  if (first_fail <= 1) throw SelectionError("g(s) >= (G - eps0) sqrt(s) fails at the smallest sample");
  sel.c2 = c0 * std::min(first_fail, c2_samples - 1) / c2_samples;
  return sel;
}

ForcingFn radial_forcing() {
  return [](double r, double, double p, double q) { return q / r - p / (r * r); };
}

namespace {

struct Fbp2Margins {
  MinTracker w2, w6, forcing, wrr, ineq_end, ineq_mid, true_end, true_mid, suff_end, suff_mid, amgm;
};

Fbp2Margins fbp2_margins(const BarrierFBP2& b, const NonlinearityProfile& profile, double A, const ForcingFn& f,
                         int resolution) {
  Fbp2Margins m;
  const double G = std::sqrt(2.0 * std::abs(profile.d3phi_critical()));
  const double e0 = b.eps0;
  const double L = b.r6 - b.r5;
  const double hb = L / 1024.0;
  const double d = b.delta, ak = std::abs(b.k);
  for (double t : time_samples(b.t_star)) {
    for (int i = 0; i <= resolution; ++i) {
      const double y = b.r5 + hb + (L - 2.0 * hb) * i / resolution;
      const double r = y + b.k * t;
      const auto v = eval_w2(b, r, t);
      const double psi = eval_psi(b.r5, b.r6, y);
      const double sp = std::sqrt(psi);
      const double adp = std::abs(dpsi(b.r5, b.r6, y));
      const bool middle = y >= b.r7 && y <= b.r8;

      m.w2.add(v.w);
      m.w6.add(b.c2 - v.w);
      const double fv = f(r, t, v.w, v.w_x);
      m.forcing.add(e0 - std::abs(fv));
      m.wrr.add(e0 - (2.0 * d * d * d + 3.0 * d * sp));

      const double ineq = g_or_nan(profile, v.w) * (v.w_xx + fv + A) - v.w_t;
      const double rhs_true =
          (G - e0) * std::sqrt(d * d * d * psi + d * psi * sp) * (A - 2.0 * e0 + 0.75 * d * adp * adp / sp);
      const double lhs_true = d * d * d * ak * adp + 1.5 * d * ak * adp * sp;
      m.amgm.add((1.0 - e0) * rhs_true - 1.5 * d * ak * adp * sp);
      if (middle) {
        m.ineq_mid.add(ineq);
        m.true_mid.add(rhs_true - lhs_true);
        m.suff_mid.add(e0 * (G - e0) * (A - 2.0 * e0) * sp - std::pow(d, 1.5) * ak * adp);
      } else {
        m.ineq_end.add(ineq);
        m.true_end.add(rhs_true - lhs_true);
        m.suff_end.add(0.75 * e0 * (G - e0) * adp - std::sqrt(d) * ak);
      }
    }
  }
  return m;
}

}  // namespace

BarrierReport verify_w2(const BarrierFBP2& b, const NonlinearityProfile& profile, double A, const ForcingFn& f,
                        int resolution, const Field1D* v0) {
  if (resolution < 8) throw DomainError("resolution must be at least 8");
  const double d3 = profile.d3phi_critical();
  if (!(d3 < -hypothesis_margin)) throw HypothesisError("phi'''(1) must be negative");
  const double G = std::sqrt(2.0 * std::abs(d3));
  const double e0 = b.eps0;
  BarrierReport rep;
  rep.parameters = {{"r5", b.r5},     {"r6", b.r6},   {"r7", b.r7}, {"r8", b.r8},         {"k", b.k},
                    {"delta", b.delta}, {"eps0", b.eps0}, {"c2", b.c2}, {"t_star", b.t_star}, {"A", A},
                    {"G", G}};
  const auto m = fbp2_margins(b, profile, A, f, resolution);
  const double L = b.r6 - b.r5;

  rep.checks.push_back(item("w2_positive", m.w2.value));
  rep.checks.push_back(item("w3_left_slope", b.delta * b.delta * b.delta * L));
  rep.checks.push_back(item("w4_right_slope", b.delta * b.delta * b.delta * L));
  if (v0) {
    MinTracker w5;
    for (int i = 0; i <= resolution; ++i) {
      const double r = b.r5 + L * i / resolution;
      w5.add(sample(*v0, r) - eval_w2(b, r, 0.0).w);
    }
    rep.checks.push_back(item("w5_initial_below", w5.value));
  } else {
    rep.checks.push_back(CheckItem{"w5_initial_below", false, 0.0, false});
  }
  rep.checks.push_back(item("w6_below_c2", m.w6.value));
  const double cone = (1.0 - e0) * (G - e0) * std::sqrt(std::max(0.0, A - 2.0 * e0)) - std::abs(b.k);
  rep.checks.push_back(item("eps0_cone_condition", cone));
  MinTracker gep;
  for (int j = 1; j < c2_samples; ++j) {
    const double s = b.c2 * j / c2_samples;
    if (s > 0.0 && s < profile.dphi_critical()) gep.add(coeff_g(profile, s) - (G - e0) * std::sqrt(s));
  }
  rep.checks.push_back(item("g_lower_bound_below_c2", gep.value, false));
  rep.checks.push_back(item("forcing_bound", m.forcing.value, false));
  rep.checks.push_back(item("wrr_lower_bound", m.wrr.value));
  rep.checks.push_back(item("inequality_endpoint_regime", m.ineq_end.value));
  rep.checks.push_back(item("inequality_middle_regime", m.ineq_mid.value));
  rep.checks.push_back(item("true_inequality_endpoint_regime", m.true_end.value, false));
  rep.checks.push_back(item("true_inequality_middle_regime", m.true_mid.value, false));
  rep.checks.push_back(item("regime_endpoint_sufficient", m.suff_end.value, false));
  rep.checks.push_back(item("regime_middle_sufficient", m.suff_mid.value, false));
  rep.checks.push_back(item("amgm_chain", m.amgm.value, false));
  return rep;
}

BarrierFBP1 fbp1_calibration(double x5, double x6) {
  if (!(x5 < x6)) throw ConfigError("barrier", "need x5 < x6");
  const double off = 0.9 * (x6 - x5) * (3.0 - std::sqrt(3.0)) / 6.0;
  BarrierFBP1 b;
  b.x5 = x5;
  b.x6 = x6;
  b.x7 = x5 + off;
  b.x8 = x6 - off;
  return b;
}

BarrierFBP1 auto_barrier_fbp1(double x5, double x6, const NonlinearityProfile& profile, const Field1D* v0,
                              double horizon) {
  BarrierFBP1 b = fbp1_calibration(x5, x6);
  const double L = x6 - x5;
  const double c0 = profile.dphi_critical();
  constexpr int n = 512;
  double delta = 0.1;
  for (int halving = 0; halving <= delta_halvings; ++halving, delta *= 0.5) {
    b.delta = delta;
    b.lambda = 0.0;
    bool ok = true;
    for (int i = 0; i <= n && ok; ++i) {
      const double x = x5 + L * i / n;
      const double w = eval_w1(b, x, 0.0).w;
      if (v0 && !(sample(*v0, x) > w)) ok = false;
      if (!(w < c0)) ok = false;
      if (x <= b.x7 || x >= b.x8) {
        const double psi = eval_psi(x5, x6, x), dp = dpsi(x5, x6, x);
        if (!(2.0 * dp * dp - 4.0 * psi - 2.0 * delta > 0.0)) ok = false;
      }
    }
    if (!ok) continue;
    try {
      b.lambda = select_lambda(b, profile);
    } catch (const SelectionError&) {
      continue;
    }
    if (verify_w1(b, profile, n, horizon, v0).all_pass()) return b;
  }
  throw SelectionError("no delta found for the FBP1 barrier within 40 halvings");
}

BarrierFBP2 auto_barrier_fbp2(double r5, double r6, double k, double t_star, const NonlinearityProfile& profile,
                              double A, const ForcingFn& f, const Field1D* v0) {
  if (!(r5 < r6)) throw ConfigError("barrier", "need r5 < r6");
  const auto sel = select_eps0_c2(profile, k, A);
  BarrierFBP2 b;
  b.r5 = r5;
  b.r6 = r6;
  b.k = k;
  b.t_star = t_star;
  b.eps0 = sel.eps0;
  b.c2 = sel.c2;
  b.r7 = r5 + 0.25 * (r6 - r5);
  b.r8 = r6 - 0.25 * (r6 - r5);
  constexpr int n = 1024;
  double delta = 0.1;
  for (int halving = 0; halving <= delta_halvings; ++halving, delta *= 0.5) {
    b.delta = delta;
    const auto m = fbp2_margins(b, profile, A, f, n);
    if (!(m.w6.value > 0.0 && m.forcing.value >= 0.0 && m.wrr.value > 0.0 && m.suff_end.value >= 0.0 &&
          m.suff_mid.value >= 0.0))
      continue;
    if (v0) {
      bool below = true;
      for (int i = 0; i <= n && below; ++i) {
        const double r = r5 + (r6 - r5) * i / n;
        if (!(sample(*v0, r) > eval_w2(b, r, 0.0).w)) below = false;
      }
      if (!below) continue;
    }
    if (verify_w2(b, profile, A, f, n, v0).all_pass()) return b;
  }
  throw SelectionError("no delta found for the FBP2 barrier within 40 halvings");
}

namespace {

ComparisonReport compare(const Trajectory& traj, double t_end, const std::function<bool(double, double)>& inside,
                         const std::function<double(double, double)>& w) {
  ComparisonReport rep;
  if (traj.snapshots.empty()) throw RangeError("empty trajectory");
  const Grid1D& g = traj.snapshots.front().grid;
  rep.tolerance = 1e-6 + 2.0 * g.spacing();
  rep.worst_margin = inf;
  for (const auto& snap : traj.snapshots) {
    if (snap.time > t_end + 1e-12) break;
    for (int i = 0; i <= g.n_cells; ++i) {
      const double x = g.node(i);
      if (!inside(x, snap.time)) continue;
      const double m = snap.values[static_cast<std::size_t>(i)] - w(x, snap.time);
      ++rep.nodes_checked;
      if (snap.time == 0.0 && !(m > 0.0)) rep.setup_ok = false;
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        rep.worst_x = x;
        rep.worst_t = snap.time;
      }
    }
  }
  rep.holds = rep.setup_ok && rep.nodes_checked > 0 && rep.worst_margin >= -rep.tolerance;
  return rep;
}

}  // namespace

ComparisonReport check_comparison(const Trajectory& traj, const BarrierFBP1& b) {
  if (traj.snapshots.empty()) throw RangeError("empty trajectory");
  const Grid1D& g = traj.snapshots.front().grid;
  if (b.x5 < g.a - 1e-12 || b.x6 > g.b + 1e-12) throw RangeError("barrier interval exceeds the trajectory grid");
  const double T = traj.snapshots.back().time;
  return compare(
      traj, T, [&](double x, double) { return x >= b.x5 && x <= b.x6; },
      [&](double x, double t) { return eval_w1(b, x, t).w; });
}

ComparisonReport check_comparison(const Trajectory& traj, const BarrierFBP2& b) {
  if (traj.snapshots.empty()) throw RangeError("empty trajectory");
  const Grid1D& g = traj.snapshots.front().grid;
  if (b.t_star > traj.snapshots.back().time + 1e-12) throw RangeError("t* beyond the trajectory end");
  const double lo = std::min(b.r5, b.r5 + b.k * b.t_star), hi = std::max(b.r6, b.r6 + b.k * b.t_star);
  if (lo < g.a - 1e-12 || hi > g.b + 1e-12) throw RangeError("barrier window exceeds the trajectory grid");
  return compare(
      traj, b.t_star, [&](double r, double t) { return r >= b.r5 + b.k * t && r <= b.r6 + b.k * t; },
      [&](double r, double t) { return eval_w2(b, r, t).w; });
}

}  // namespace pmlab
