#pragma once

#include <string>
#include <vector>

#include "pmlab/nonlinearity.hpp"
#include "pmlab/solvers.hpp"

namespace pmlab {

struct Interval {
  double left = 0.0;
  double right = 0.0;
  double length() const { return right - left; }
  bool contains(double x) const { return left <= x && x <= right; }
};

/// Maximal intervals where |u_x| < 1 (or > 1 for the supercritical variant).
struct RegionSnapshot {
  double time = 0.0;
  std::vector<Interval> intervals;
};

enum class RegionKind { Subcritical, Supercritical };

RegionSnapshot region_intervals(const Field1D& field, RegionKind kind);
RegionSnapshot subcritical_intervals(const Field1D& field, const NonlinearityProfile& profile);
RegionSnapshot supercritical_intervals(const Field1D& field, const NonlinearityProfile& profile);

struct InclusionReport {
  bool holds = true;
  double worst_violation = 0.0;  ///< largest uncovered length beyond slack
  double worst_s = 0.0;
  double worst_t = 0.0;
  std::size_t pairs_checked = 0;
};

/// Subcritical: every interval at time s is covered by the region at t > s.
/// Supercritical: every interval at time t is covered by the region at s < t.
InclusionReport check_monotone_inclusion(const Trajectory& traj, const NonlinearityProfile& profile,
                                         int slack_cells, RegionKind kind = RegionKind::Subcritical);

enum class Orientation { SubcriticalLeft, SubcriticalRight };
enum class TrackStatus { Complete, Merged, Exited, Lost };
std::string to_string(TrackStatus s);

/// Endpoint of the subcritical interval that contains `anchor`.
struct FrontSelector {
  double anchor = 0.0;
  bool right_end = true;
};

struct FrontTrajectory {
  std::vector<double> times;
  std::vector<double> positions;
  Orientation orientation = Orientation::SubcriticalLeft;
  TrackStatus status = TrackStatus::Complete;
  double end_time = 0.0;  ///< time at which the status was decided
};

FrontTrajectory track_front(const Trajectory& traj, const NonlinearityProfile& profile, FrontSelector which);

struct SpeedSample {
  double t = 0.0;
  double speed = 0.0;
};

/// Least-squares slope over a centered sliding window.
std::vector<SpeedSample> measured_speed(const FrontTrajectory& front, double window);

double heuristic_speed(const Field1D& field, const NonlinearityProfile& profile, double front_position, Model model);

struct ExpansionSet {
  double r3 = 0.0;
  double r4 = 0.0;
  double k0 = 0.0;
  double T = 0.0;
};

struct ExpansionReport {
  bool vacuous = false;
  bool containment_holds = false;
  double worst_violation = 0.0;
  double worst_time = 0.0;
  bool invaded = false;
  double invasion_time = -1.0;
  double predicted_invasion_time = 0.0;
  double mean_outward_speed = 0.0;
  double left_speed = 0.0;
  double right_speed = 0.0;
};

/// Checks I^-(t) contains (r3 - k0 t, r4 + k0 t) within tolerance_frac (r2 - r1).
ExpansionReport check_expansion_rate(const Trajectory& traj, const NonlinearityProfile& profile,
                                     const ExpansionSet& set, double tolerance_frac);

struct SupGradSample {
  double t = 0.0;
  double M = 0.0;
  double bound = 0.0;
};

struct SupGradReport {
  bool holds = true;
  double worst_margin = 0.0;
  std::vector<SupGradSample> samples;
};

SupGradReport check_supgrad_bound(const Trajectory& traj, double r3, double r5, const NonlinearityProfile& profile,
                                  double tol = 1e-3);

struct NonexistenceThresholds {
  double gradient_threshold = 0.0;
  double T0 = 0.0;
};

NonexistenceThresholds nonexistence_certificate(double r1, double r2, double r3, double r4, double r5,
                                                const NonlinearityProfile& profile);

}  // namespace pmlab
