#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmlab/nonlinearity.hpp"
#include "pmlab/solvers.hpp"

namespace pmlab {

/// w(x,t) = exp(-lambda t) (delta^2 psi + delta psi^2), psi = (x - x5)(x6 - x).
struct BarrierFBP1 {
  double x5 = 0.0;
  double x6 = 1.0;
  double delta = 0.0;
  double lambda = 0.0;
  double x7 = 0.25;
  double x8 = 0.75;
};

/// w(r,t) = delta^3 psi(y) + delta psi(y)^{3/2}, y = r - k t.
struct BarrierFBP2 {
  double r5 = 0.0;
  double r6 = 1.0;
  double k = 0.0;
  double delta = 0.0;
  double eps0 = 0.0;
  double c2 = 0.0;
  double r7 = 0.25;
  double r8 = 0.75;
  double t_star = 0.0;
};

struct BarrierValues {
  double w = 0.0;
  double w_t = 0.0;
  double w_x = 0.0;  ///< w_r for the FBP2 barrier
  double w_xx = 0.0;
};

/// The cone D = {r3 - k0 t < r < r4 + k0 t} within [r1, r2] and the moving window D*.
struct ConeSet {
  double r1 = 0.0, r2 = 1.0, r3 = 0.0, r4 = 1.0, k0 = 0.0;
  double r5 = 0.0, r6 = 1.0, k = 0.0, t_star = 0.0;

  bool in_cone(double r, double t) const;
  bool in_window(double r, double t) const;
  /// D* is a parallelogram and D convex, so the corners decide.
  bool window_inside_cone() const;
};

double eval_psi(double x5, double x6, double x);
BarrierValues eval_w1(const BarrierFBP1& b, double x, double t);
BarrierValues eval_w2(const BarrierFBP2& b, double r, double t);

struct LambdaSelection {
  double lambda = 0.0;
  double sup_t0 = 0.0;
  double sup_tT = 0.0;
  double argmax = 0.0;
  bool t_sample_exceeds = false;  ///< t = T sample larger than the t = 0 one
};

inline constexpr int lambda_samples = 512;
inline constexpr double lambda_safety = 1.05;

/// 1.05 times the sampled supremum of g(w)(4 psi + 2 delta)/(delta psi + psi^2) on [x7, x8] at t = 0.
LambdaSelection select_lambda_detail(const BarrierFBP1& partial, const NonlinearityProfile& profile,
                                     double horizon = 0.0);
double select_lambda(const BarrierFBP1& partial, const NonlinearityProfile& profile);

struct CheckItem {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  bool checked = true;
};

struct BarrierReport {
  std::vector<CheckItem> checks;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::string> notes;

  bool all_pass() const;
  double min_margin() const;
  const CheckItem* find(const std::string& name) const;
};

/// Checks (w2)-(w4), (w6) and the strict inequality w_t < g(w) w_xx on
/// interior nodes for t in {0, T/4, ..., T}; (w5) when v0 is given.
BarrierReport verify_w1(const BarrierFBP1& b, const NonlinearityProfile& profile, int resolution,
                        double horizon, const Field1D* v0 = nullptr);

struct EpsilonSelection {
  double eps0 = 0.0;
  double c2 = 0.0;
  double eps_root = 0.0;  ///< zero of the margin function, or the interval end
};

inline constexpr int c2_samples = 4096;

EpsilonSelection select_eps0_c2(const NonlinearityProfile& profile, double k, double A);

using ForcingFn = std::function<double(double r, double t, double p, double q)>;
/// f(r,t,p,q) = q/r - p/r^2.
ForcingFn radial_forcing();

BarrierReport verify_w2(const BarrierFBP2& b, const NonlinearityProfile& profile, double A, const ForcingFn& f,
                        int resolution, const Field1D* v0 = nullptr);

/// Interior points x5 + 0.9 L (3 - sqrt 3)/6 and symmetric.
BarrierFBP1 fbp1_calibration(double x5, double x6);
/// delta by halving from 0.1 (at most 40 times), then lambda.
BarrierFBP1 auto_barrier_fbp1(double x5, double x6, const NonlinearityProfile& profile, const Field1D* v0,
                              double horizon);
BarrierFBP2 auto_barrier_fbp2(double r5, double r6, double k, double t_star, const NonlinearityProfile& profile,
                              double A, const ForcingFn& f, const Field1D* v0);

inline constexpr int delta_halvings = 40;

struct ComparisonReport {
  bool setup_ok = true;
  bool holds = true;
  double tolerance = 0.0;
  double worst_margin = 0.0;  ///< min of v - w over the region
  double worst_x = 0.0;
  double worst_t = 0.0;
  std::size_t nodes_checked = 0;
};

ComparisonReport check_comparison(const Trajectory& traj, const BarrierFBP1& b);
ComparisonReport check_comparison(const Trajectory& traj, const BarrierFBP2& b);

}  // namespace pmlab
