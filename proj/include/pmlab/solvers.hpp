#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pmlab/grid.hpp"
#include "pmlab/nonlinearity.hpp"

namespace pmlab {

enum class Model { PM1D, PMRadial, FBP1, FBP2 };
enum class Boundary { Neumann, Dirichlet };

std::string to_string(Model m);
std::string to_string(Boundary b);
Model model_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

inline constexpr double grad_blowup_cap = 1e3;
inline constexpr double grad_floor = 1e-9;

struct RunConfig {
  Model model = Model::PM1D;
  Boundary boundary = Boundary::Neumann;
  double cfl_safety = 0.4;
  double t_end = 1.0;
  double snapshot_dt = 0.01;
  int radial_dimension = 2;
  double blowup_cap = grad_blowup_cap;
};

/// Step statistics for one snapshot interval.
struct DtRecord {
  double t_begin = 0.0;
  double t_end = 0.0;
  long long steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
};

struct Trajectory {
  std::vector<Field1D> snapshots;
  Model model = Model::PM1D;
  std::string profile_name;
  std::vector<DtRecord> dt_history;
  long long total_steps = 0;
  bool breakdown = false;
  double breakdown_time = 0.0;
  std::string breakdown_reason;

  std::vector<double> times() const;
};

/// Semidiscrete right-hand side for one of the four models.
///
/// PM models use the flux-difference form; FBP models the nodal form with
/// g(v) and zero rate where v = 0. Boundaries use a ghost node equal to the
/// boundary value (Neumann, zero flux) or a frozen endpoint (Dirichlet).
class SemiDiscreteModel {
 public:
  SemiDiscreteModel(Model model, Boundary boundary, NonlinearityProfile profile, int radial_dimension = 2);

  Model model() const { return model_; }
  Boundary boundary() const { return boundary_; }
  const NonlinearityProfile& profile() const { return profile_; }

  void rhs(const Grid1D& grid, std::span<const double> u, std::span<double> out) const;
  /// max |phi''(gradient)| for PM models, max g(v) for FBP models.
  double max_coefficient(const Grid1D& grid, std::span<const double> u) const;

 private:
  void check_grid(const Grid1D& grid, std::size_t n) const;
  void rhs_pm(const Grid1D& grid, std::span<const double> u, std::span<double> out) const;
  void rhs_fbp(const Grid1D& grid, std::span<const double> v, std::span<double> out) const;

  Model model_;
  Boundary boundary_;
  NonlinearityProfile profile_;
  int radial_dimension_;
  mutable std::vector<double> flux_;
};

std::vector<double> rhs_pm1d(const Field1D& field, const NonlinearityProfile& profile,
                             Boundary boundary = Boundary::Neumann);
std::vector<double> rhs_pm_radial(const Field1D& field, const NonlinearityProfile& profile, int n_dim,
                                  Boundary boundary = Boundary::Neumann);
std::vector<double> rhs_fbp1(const Field1D& field, const NonlinearityProfile& profile,
                             Boundary boundary = Boundary::Neumann);
std::vector<double> rhs_fbp2(const Field1D& field, const NonlinearityProfile& profile,
                             Boundary boundary = Boundary::Neumann);

struct StepResult {
  Field1D field;
  double dt = 0.0;
};

/// One explicit Euler step with dt = cfl_safety h^2 / max coefficient, capped by dt_cap.
StepResult step_adaptive(const Field1D& field, const SemiDiscreteModel& model, double cfl_safety, double dt_cap);

/// Called after every accepted step (and once for the initial state).
using StepObserver = std::function<void(double t, std::span<const double> values)>;

Trajectory integrate(const Field1D& initial, const RunConfig& config, const NonlinearityProfile& profile,
                     const StepObserver& observer = {});

/// v_i = phi'(1) - h((u_{i+1} - u_i)/h) on the midpoint grid.
Field1D transform_u_to_v(const Field1D& u, const NonlinearityProfile& profile);

/// Square patch centered at the origin, nodes i, j = -n..n, spacing half_width / n.
struct Patch2D {
  double half_width = 1e-3;
  int n = 8;
  std::vector<double> values;  ///< row-major, index (i + n) * (2n + 1) + (j + n), i along x

  int side() const { return 2 * n + 1; }
  double spacing() const { return half_width / n; }
  double& at(int i, int j) { return values[static_cast<std::size_t>((i + n) * side() + (j + n))]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>((i + n) * side() + (j + n))]; }

  static Patch2D sample(double half_width, int n, const std::function<double(double, double)>& f);
};

/// u_t = d/dx Psi_1 + d/dy Psi_2 by centered differences; nodes within two
/// of the edge are left as NaN.
Patch2D patch2d_time_derivative(const Patch2D& patch, const NonlinearityProfile& profile);

}  // namespace pmlab
