#include "pmlab/region_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

std::string to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Complete:
      return "complete";
    case TrackStatus::Merged:
      return "merged";
    case TrackStatus::Exited:
      return "exited";
    case TrackStatus::Lost:
      return "lost";
  }
  return "?";
}

namespace {

constexpr double level = NonlinearityProfile::sigma_critical;

// crossing of |p| = 1 between midpoints m0 (value p0) and m0 + h (value p1)
double crossing(double m0, double h, double p0, double p1) {
  const double big = std::abs(p0) > std::abs(p1) ? p0 : p1;
  const double L = big >= 0.0 ? level : -level;
  if (p1 == p0) return m0 + 0.5 * h;
  const double s = std::clamp((L - p0) / (p1 - p0), 0.0, 1.0);
  return m0 + h * s;
}

double uncovered(const Interval& j, const std::vector<Interval>& cover) {
  if (j.right <= j.left) return 0.0;
  double covered = 0.0;
  for (const auto& c : cover) {
    const double lo = std::max(j.left, c.left), hi = std::min(j.right, c.right);
    if (hi > lo) covered += hi - lo;
  }
  return std::max(0.0, j.length() - covered);
}

const Interval* containing(const std::vector<Interval>& v, double x) {
  for (const auto& i : v)
    if (i.contains(x)) return &i;
  return nullptr;
}

}  // namespace

RegionSnapshot region_intervals(const Field1D& field, RegionKind kind) {
  RegionSnapshot snap;
  snap.time = field.time;
  const auto p = midpoint_gradients(field);
  const Grid1D& g = field.grid;
  const double h = g.spacing();
  const std::size_t n = p.size();
  auto inside = [&](std::size_t i) {
    const double a = std::abs(p[i]);
    return kind == RegionKind::Subcritical ? a < level : a > level;
  };
  std::size_t i = 0;
  while (i < n) {
    if (!inside(i)) {
      ++i;
      continue;
    }
    const std::size_t s = i;
    while (i < n && inside(i)) ++i;
    const std::size_t e = i - 1;
    Interval iv;
    iv.left = s == 0 ? g.a : crossing(g.midpoint(static_cast<int>(s - 1)), h, p[s - 1], p[s]);
    iv.right = e + 1 == n ? g.b : crossing(g.midpoint(static_cast<int>(e)), h, p[e], p[e + 1]);
    snap.intervals.push_back(iv);
  }
  return snap;
}

RegionSnapshot subcritical_intervals(const Field1D& field, const NonlinearityProfile&) {
  return region_intervals(field, RegionKind::Subcritical);
}

RegionSnapshot supercritical_intervals(const Field1D& field, const NonlinearityProfile&) {
  return region_intervals(field, RegionKind::Supercritical);
}

InclusionReport check_monotone_inclusion(const Trajectory& traj, const NonlinearityProfile&, int slack_cells,
                                         RegionKind kind) {
  InclusionReport rep;
  if (traj.snapshots.empty()) return rep;
  const double slack = slack_cells * traj.snapshots.front().grid.spacing();
  std::vector<RegionSnapshot> regions;
  regions.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) regions.push_back(region_intervals(s, kind));

  for (std::size_t a = 0; a < regions.size(); ++a) {
    for (std::size_t b = a + 1; b < regions.size(); ++b) {
      const auto& early = regions[a];
      const auto& late = regions[b];
      const auto& inner = kind == RegionKind::Subcritical ? early : late;
      const auto& outer = kind == RegionKind::Subcritical ? late : early;
      ++rep.pairs_checked;
      for (const auto& iv : inner.intervals) {
        const Interval shrunk{iv.left + slack, iv.right - slack};
        const double miss = uncovered(shrunk, outer.intervals);
        if (miss > rep.worst_violation) {
          rep.worst_violation = miss;
          rep.worst_s = early.time;
          rep.worst_t = late.time;
        }
      }
    }
  }
  rep.holds = rep.worst_violation <= 1e-12;
  return rep;
}

FrontTrajectory track_front(const Trajectory& traj, const NonlinearityProfile& profile, FrontSelector which) {
  FrontTrajectory ft;
  ft.orientation = which.right_end ? Orientation::SubcriticalLeft : Orientation::SubcriticalRight;
  if (traj.snapshots.empty()) throw TrackingError("empty trajectory");
  const Grid1D& g = traj.snapshots.front().grid;
  auto at_edge = [&](double x) { return which.right_end ? x >= g.b - 1e-12 : x <= g.a + 1e-12; };

  RegionSnapshot prev = subcritical_intervals(traj.snapshots.front(), profile);
  const Interval* iv = containing(prev.intervals, which.anchor);
  if (!iv) throw TrackingError("no subcritical interval contains the anchor at t = 0");
  double x = which.right_end ? iv->right : iv->left;
  if (at_edge(x)) throw TrackingError("selected interface absent at t = 0");
  ft.times.push_back(traj.snapshots.front().time);
  ft.positions.push_back(x);
  ft.end_time = ft.times.back();

  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const auto cur = subcritical_intervals(traj.snapshots[k], profile);
    const double t = cur.time;
    iv = containing(cur.intervals, which.anchor);
    if (!iv) {
      ft.status = TrackStatus::Lost;
      ft.end_time = t;
      return ft;
    }
    int overlaps = 0;
    for (const auto& p : prev.intervals)
      if (std::min(p.right, iv->right) > std::max(p.left, iv->left)) ++overlaps;
    if (overlaps > 1) {
      ft.status = TrackStatus::Merged;
      ft.end_time = t;
      return ft;
    }
    x = which.right_end ? iv->right : iv->left;
    if (at_edge(x)) {
      ft.status = TrackStatus::Exited;
      ft.end_time = t;
      return ft;
    }
    ft.times.push_back(t);
    ft.positions.push_back(x);
    ft.end_time = t;
    prev = cur;
  }
  return ft;
}

std::vector<SpeedSample> measured_speed(const FrontTrajectory& front, double window) {
  std::vector<SpeedSample> out;
  const std::size_t n = front.times.size();
  if (n < 3) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = front.times[i];
    double st = 0, sx = 0, stt = 0, stx = 0;
    int c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(front.times[j] - t0) > 0.5 * window * (1.0 + 1e-12)) continue;
      const double t = front.times[j] - t0, x = front.positions[j];
      st += t;
      sx += x;
      stt += t * t;
      stx += t * x;
      ++c;
    }
    if (c < 3) continue;
    const double den = c * stt - st * st;
    if (den <= 0.0) continue;
    out.push_back({t0, (c * stx - st * sx) / den});
  }
  return out;
}

double heuristic_speed(const Field1D& field, const NonlinearityProfile& profile, double alpha, Model model) {
  const Grid1D& g = field.grid;
  if (!(alpha >= g.a && alpha <= g.b)) {
    std::ostringstream msg;
    msg << "front position " << alpha << " outside grid [" << g.a << ", " << g.b << "]";
    throw RangeError(msg.str());
  }
  const double h = g.spacing();
  const int k = std::clamp(static_cast<int>(std::lround((alpha - g.a) / h)), 1, g.n_cells - 1);
  const auto& u = field.values;
  const auto ki = static_cast<std::size_t>(k);
  const double uxx = (u[ki + 1] - 2.0 * u[ki] + u[ki - 1]) / (h * h);
  const double s = u[ki + 1] - u[ki - 1] >= 0.0 ? 1.0 : -1.0;
  const double d3 = s * profile.d3phi_critical();  // phi''' is odd
  const double d1 = profile.dphi_critical();
  if (model == Model::PM1D || model == Model::FBP1) return -d3 * uxx;
  if (std::abs(uxx) > 1e-9) return -d3 * uxx + s * d1 / (alpha * alpha * uxx);
  return 2.0 * std::sqrt(d1 * std::abs(profile.d3phi_critical())) / alpha;
}

ExpansionReport check_expansion_rate(const Trajectory& traj, const NonlinearityProfile& profile,
                                     const ExpansionSet& set, double tolerance_frac) {
  ExpansionReport rep;
  if (traj.snapshots.empty()) {
    rep.vacuous = true;
    return rep;
  }
  const Grid1D& g = traj.snapshots.front().grid;
  const double slack = tolerance_frac * (g.b - g.a);
  const double center = 0.5 * (set.r3 + set.r4);
  const auto first = subcritical_intervals(traj.snapshots.front(), profile);
  if (!(set.r4 > set.r3) || first.intervals.empty() || !containing(first.intervals, center)) {
    rep.vacuous = true;
    rep.containment_holds = true;
    return rep;
  }
  rep.predicted_invasion_time =
      set.k0 > 0.0 ? (g.b - g.a) / set.k0 : std::numeric_limits<double>::infinity();
  const double horizon = set.T > 0.0 ? set.T : traj.snapshots.back().time;

  const Interval* iv0 = containing(first.intervals, center);
  const double left0 = iv0->left, right0 = iv0->right;
  double left_x = left0, right_x = right0, left_t = 0.0, right_t = 0.0;
  bool left_done = left0 <= g.a + 1e-12, right_done = right0 >= g.b - 1e-12;
  bool tracking = true;

  for (const auto& snap : traj.snapshots) {
    const double t = snap.time;
    if (t > horizon + 1e-12) break;
    const auto reg = subcritical_intervals(snap, profile);
    const Interval cone{std::max(g.a, set.r3 - set.k0 * t), std::min(g.b, set.r4 + set.k0 * t)};
    const double miss = uncovered(Interval{cone.left + slack, cone.right - slack}, reg.intervals);
    if (miss > rep.worst_violation) {
      rep.worst_violation = miss;
      rep.worst_time = t;
    }
    if (!rep.invaded && reg.intervals.size() == 1 && reg.intervals[0].left <= g.a + 1e-12 &&
        reg.intervals[0].right >= g.b - 1e-12) {
      rep.invaded = true;
      rep.invasion_time = t;
    }
    if (tracking && t <= 0.5 * horizon + 1e-12) {
      const Interval* iv = containing(reg.intervals, center);
      if (!iv) {
        tracking = false;
        continue;
      }
      if (!left_done) {
        left_x = iv->left;
        left_t = t;
        left_done = left_x <= g.a + 1e-12;
      }
      if (!right_done) {
        right_x = iv->right;
        right_t = t;
        right_done = right_x >= g.b - 1e-12;
      }
    }
  }
  rep.containment_holds = rep.worst_violation <= 1e-12;
  rep.left_speed = left_t > 0.0 ? (left0 - left_x) / left_t : 0.0;
  rep.right_speed = right_t > 0.0 ? (right_x - right0) / right_t : 0.0;
  rep.mean_outward_speed = 0.5 * (rep.left_speed + rep.right_speed);
  return rep;
}

SupGradReport check_supgrad_bound(const Trajectory& traj, double r3, double r5, const NonlinearityProfile& profile,
                                  double tol) {
  SupGradReport rep;
  if (traj.snapshots.empty()) return rep;
  const Grid1D& g = traj.snapshots.front().grid;
  if (!(r3 >= g.a && r5 <= g.b && r3 < r5)) throw RangeError("[r3, r5] must lie inside the grid");
  const double h = g.spacing();
  const int lo = std::max(1, static_cast<int>(std::ceil((r3 - g.a) / h - 1e-9)));
  const int hi = std::min(g.n_cells - 1, static_cast<int>(std::floor((r5 - g.a) / h + 1e-9)));
  const double slope = profile.dphi_critical() / (g.a * g.a);
  double M0 = 0.0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& u = traj.snapshots[k].values;
    double M = -std::numeric_limits<double>::infinity();
    for (int i = lo; i <= hi; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      M = std::max(M, (u[ui + 1] - u[ui - 1]) / (2.0 * h));
    }
    if (k == 0) M0 = M;
    const double t = traj.snapshots[k].time;
    const double bound = M0 - slope * t;
    rep.samples.push_back({t, M, bound});
    rep.worst_margin = std::min(rep.worst_margin, M - bound + tol);
  }
  rep.holds = rep.worst_margin >= 0.0;
  return rep;
}

NonexistenceThresholds nonexistence_certificate(double r1, double r2, double r3, double r4, double r5,
                                                const NonlinearityProfile& profile) {
  if (!(0.0 < r1 && r1 < r3 && r3 < r4 && r4 < r5 && r5 < r2))
    throw ConfigError("geometry", "need 0 < r1 < r3 < r4 < r5 < r2");
  const double d1 = profile.dphi_critical();
  const double d3 = profile.d3phi_critical();
  if (!(d3 < -hypothesis_margin)) throw HypothesisError("phi'''(1) must be negative");
  NonexistenceThresholds out;
  out.gradient_threshold = 1.0 + r2 * (r2 - r1) / (r1 * r1) * std::sqrt(d1 / (2.0 * std::abs(d3)));
  out.T0 = r2 * (r2 - r1) / std::sqrt(2.0 * d1 * std::abs(d3));
  return out;
}

}  // namespace pmlab
