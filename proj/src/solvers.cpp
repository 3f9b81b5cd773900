#include "pmlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

std::string to_string(Model m) {
  switch (m) {
    case Model::PM1D:
      return "PM1D";
    case Model::PMRadial:
      return "PMRadial";
    case Model::FBP1:
      return "FBP1";
    case Model::FBP2:
      return "FBP2";
  }
  return "?";
}

std::string to_string(Boundary b) { return b == Boundary::Neumann ? "neumann" : "dirichlet"; }

Model model_from_string(const std::string& s) {
  if (s == "PM1D" || s == "pm1d") return Model::PM1D;
  if (s == "PMRadial" || s == "pm-radial") return Model::PMRadial;
  if (s == "FBP1" || s == "fbp1") return Model::FBP1;
  if (s == "FBP2" || s == "fbp2") return Model::FBP2;
  throw ConfigError("run.model", "unknown model '" + s + "'");
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "neumann") return Boundary::Neumann;
  if (s == "dirichlet") return Boundary::Dirichlet;
  throw ConfigError("run.boundary", "unknown boundary '" + s + "'");
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.time);
  return t;
}

namespace {

bool is_pm(Model m) { return m == Model::PM1D || m == Model::PMRadial; }
bool is_radial(Model m) { return m == Model::PMRadial || m == Model::FBP2; }

void require_finite(std::span<const double> u) {
  for (double x : u)
    if (!std::isfinite(x)) throw NumericError("non-finite field value");
}

}  // namespace

SemiDiscreteModel::SemiDiscreteModel(Model model, Boundary boundary, NonlinearityProfile profile,
                                     int radial_dimension)
    : model_(model), boundary_(boundary), profile_(std::move(profile)), radial_dimension_(radial_dimension) {
  if (model_ == Model::PMRadial && radial_dimension_ < 1) throw ConfigError("run.radial_dimension", "must be >= 1");
}

void SemiDiscreteModel::check_grid(const Grid1D& grid, std::size_t n) const {
  if (n != static_cast<std::size_t>(grid.node_count())) throw NumericError("field length does not match grid");
  if (grid.n_cells < 2) throw DomainError("grid too small");
  if (is_radial(model_) && !(grid.a > 0.0)) throw DomainError("radial model needs r1 > 0");
}

void SemiDiscreteModel::rhs(const Grid1D& grid, std::span<const double> u, std::span<double> out) const {
  check_grid(grid, u.size());
  if (out.size() != u.size()) throw NumericError("output length does not match field");
  require_finite(u);
  if (is_pm(model_))
    rhs_pm(grid, u, out);
  else
    rhs_fbp(grid, u, out);
}

void SemiDiscreteModel::rhs_pm(const Grid1D& grid, std::span<const double> u, std::span<double> out) const {
  const std::size_t N = u.size() - 1;
  const double h = grid.spacing();
  const double ih = 1.0 / h;
  const auto& p = profile_;

  double f_left = 0.0;  // zero-flux ghost
  for (std::size_t i = 0; i < N; ++i) {
    const double f_right = p.d1((u[i + 1] - u[i]) * ih);
    out[i] = (f_right - f_left) * ih;
    f_left = f_right;
  }
  out[N] = -f_left * ih;

  if (model_ == Model::PMRadial && radial_dimension_ != 1) {
    const double c = static_cast<double>(radial_dimension_ - 1);
    const double i2h = 0.5 * ih;
    for (std::size_t i = 0; i <= N; ++i) {
      const double ul = i == 0 ? u[0] : u[i - 1];
      const double ur = i == N ? u[N] : u[i + 1];
      out[i] += c * p.d1((ur - ul) * i2h) / grid.node(static_cast<int>(i));
    }
  }
  if (boundary_ == Boundary::Dirichlet) {
    out[0] = 0.0;
    out[N] = 0.0;
  }
}

void SemiDiscreteModel::rhs_fbp(const Grid1D& grid, std::span<const double> v, std::span<double> out) const {
  const std::size_t N = v.size() - 1;
  const double h = grid.spacing();
  const double ih2 = 1.0 / (h * h);
  const double cap = profile_.dphi_critical();
  for (std::size_t i = 0; i <= N; ++i) {
    if (v[i] >= cap) {
      std::ostringstream msg;
      msg << "v = " << v[i] << " at node " << i << " reaches phi'(1) = " << cap;
      throw RangeError(msg.str());
    }
  }
  auto at = [&](std::size_t i) { return std::max(v[i], 0.0); };
  for (std::size_t i = 0; i <= N; ++i) {
    const double vi = at(i);
    if (vi <= 0.0) {
      out[i] = 0.0;
      continue;
    }
    const double vl = i == 0 ? vi : at(i - 1);
    const double vr = i == N ? vi : at(i + 1);
    double bracket = (vl - 2.0 * vi + vr) * ih2;
    if (model_ == Model::FBP2) {
      const double r = grid.node(static_cast<int>(i));
      bracket += (vr - vl) / (2.0 * h * r) - vi / (r * r) + cap / (r * r);
    }
    out[i] = coeff_g(profile_, vi) * bracket;
  }
  if (boundary_ == Boundary::Dirichlet) {
    out[0] = 0.0;
    out[N] = 0.0;
  }
}

double SemiDiscreteModel::max_coefficient(const Grid1D& grid, std::span<const double> u) const {
  double m = 0.0;
  if (is_pm(model_)) {
    const double ih = 1.0 / grid.spacing();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) m = std::max(m, std::abs(profile_.d2((u[i + 1] - u[i]) * ih)));
  } else {
    for (double v : u)
      if (v > 0.0) m = std::max(m, coeff_g(profile_, v));
  }
  return m;
}

namespace {

std::vector<double> eval_rhs(const Field1D& field, const SemiDiscreteModel& model) {
  std::vector<double> out(field.values.size());
  model.rhs(field.grid, field.values, out);
  return out;
}

}  // namespace

std::vector<double> rhs_pm1d(const Field1D& field, const NonlinearityProfile& profile, Boundary boundary) {
  return eval_rhs(field, SemiDiscreteModel(Model::PM1D, boundary, profile));
}

std::vector<double> rhs_pm_radial(const Field1D& field, const NonlinearityProfile& profile, int n_dim,
                                  Boundary boundary) {
  return eval_rhs(field, SemiDiscreteModel(Model::PMRadial, boundary, profile, n_dim));
}

std::vector<double> rhs_fbp1(const Field1D& field, const NonlinearityProfile& profile, Boundary boundary) {
  return eval_rhs(field, SemiDiscreteModel(Model::FBP1, boundary, profile));
}

std::vector<double> rhs_fbp2(const Field1D& field, const NonlinearityProfile& profile, Boundary boundary) {
  return eval_rhs(field, SemiDiscreteModel(Model::FBP2, boundary, profile));
}

StepResult step_adaptive(const Field1D& field, const SemiDiscreteModel& model, double cfl_safety, double dt_cap) {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("run.cfl_safety", "must lie in (0, 1]");
  if (!(dt_cap > 0.0)) throw ConfigError("run.snapshot_dt", "must be positive");
  const std::vector<double> du = eval_rhs(field, model);
  const double h = field.grid.spacing();
  const double c = model.max_coefficient(field.grid, field.values);
  const double dt = c > 0.0 ? std::min(cfl_safety * h * h / c, dt_cap) : dt_cap;
  StepResult res{field, dt};
  const bool clamp = !is_pm(model.model());
  for (std::size_t i = 0; i < du.size(); ++i) {
    double x = res.field.values[i] + dt * du[i];
    if (clamp && x < 0.0) x = 0.0;
    res.field.values[i] = x;
  }
  res.field.time = field.time + dt;
  return res;
}

namespace {

struct BreakdownCheck {
  bool broken = false;
  std::string reason;
};

BreakdownCheck check_state(const RunConfig& cfg, const Grid1D& grid, std::span<const double> u, double cap) {
  for (double x : u)
    if (!std::isfinite(x)) return {true, "non-finite"};
  if (is_pm(cfg.model)) {
    const double ih = 1.0 / grid.spacing();
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
      if (std::abs(u[i + 1] - u[i]) * ih > cfg.blowup_cap) return {true, "gradient-cap"};
  } else {
    for (double x : u)
      if (x >= cap) return {true, "range"};
  }
  return {};
}

}  // namespace

Trajectory integrate(const Field1D& initial, const RunConfig& cfg, const NonlinearityProfile& profile,
                     const StepObserver& observer) {
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("run.t_end", "must be >= 0");
  if (!(cfg.snapshot_dt > 0.0)) throw ConfigError("run.snapshot_dt", "must be positive");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) throw ConfigError("run.cfl_safety", "must lie in (0, 1]");
  try {
    initial.validate();
  } catch (const NumericError& e) {
    throw ConfigError("initial", e.what());
  }
  if (is_radial(cfg.model) && !(initial.grid.a > 0.0)) throw ConfigError("grid.a", "radial model needs r1 > 0");
  const double cap = profile.dphi_critical();
  if (!is_pm(cfg.model)) {
    for (double v : initial.values)
      if (!(v >= 0.0 && v < cap)) throw ConfigError("initial", "FBP datum must satisfy 0 <= v < phi'(1)");
  }

  const SemiDiscreteModel model(cfg.model, cfg.boundary, profile, cfg.radial_dimension);
  const Grid1D& grid = initial.grid;
  const double h = grid.spacing();
  const bool clamp = !is_pm(cfg.model);

  Trajectory traj;
  traj.model = cfg.model;
  traj.profile_name = profile.name();
  Field1D start = initial;
  start.time = 0.0;
  traj.snapshots.push_back(start);

  std::vector<double> cur = start.values, next(cur.size()), du(cur.size());
  double t = 0.0;
  if (observer) observer(t, cur);

  long long k = 1;
  const double eps_t = 1e-12 * std::max(1.0, cfg.t_end);
  while (t < cfg.t_end - eps_t) {
    const double target = std::min(static_cast<double>(k) * cfg.snapshot_dt, cfg.t_end);
    DtRecord rec{t, target, 0, std::numeric_limits<double>::infinity(), 0.0};
    bool stop = false;
    while (t < target - eps_t) {
      model.rhs(grid, cur, du);
      const double c = model.max_coefficient(grid, cur);
      const double room = target - t;
      double dt = c > 0.0 ? cfg.cfl_safety * h * h / c : room;
      if (dt >= room - eps_t) dt = room;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        double x = cur[i] + dt * du[i];
        if (clamp && x < 0.0) x = 0.0;
        next[i] = x;
      }
      const double t_new = dt == room ? target : t + dt;
      const auto bd = check_state(cfg, grid, next, cap);
      if (bd.broken) {
        traj.breakdown = true;
        traj.breakdown_time = t_new;
        traj.breakdown_reason = bd.reason;
        stop = true;
        break;
      }
      cur.swap(next);
      t = t_new;
      ++rec.steps;
      ++traj.total_steps;
      rec.dt_min = std::min(rec.dt_min, dt);
      rec.dt_max = std::max(rec.dt_max, dt);
      if (observer) observer(t, cur);
    }
    if (rec.steps > 0) {
      rec.t_end = t;
      traj.dt_history.push_back(rec);
    }
    if (t > traj.snapshots.back().time) traj.snapshots.push_back(Field1D{grid, cur, t});
    if (stop) break;
    ++k;
  }
  return traj;
}

Field1D transform_u_to_v(const Field1D& u, const NonlinearityProfile& profile) {
  const auto p = midpoint_gradients(u);
  Field1D v{u.grid.midpoint_grid(), std::vector<double>(p.size()), u.time};
  const double cap = profile.dphi_critical();
  for (std::size_t i = 0; i < p.size(); ++i) v.values[i] = std::max(0.0, cap - truncated_flux_h(profile, p[i]));
  return v;
}

Patch2D Patch2D::sample(double half_width, int n, const std::function<double(double, double)>& f) {
  if (!(half_width > 0.0)) throw DomainError("patch half_width must be positive");
  if (n < 3) throw DomainError("patch needs n >= 3");
  Patch2D p{half_width, n, {}};
  p.values.resize(static_cast<std::size_t>(p.side()) * p.side());
  const double h = p.spacing();
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) p.at(i, j) = f(i * h, j * h);
  return p;
}

Patch2D patch2d_time_derivative(const Patch2D& patch, const NonlinearityProfile& profile) {
  const int n = patch.n;
  if (n < 3) throw DomainError("patch needs n >= 3");
  if (patch.values.size() != static_cast<std::size_t>(patch.side()) * patch.side())
    throw NumericError("patch size mismatch");
  const double h = patch.spacing();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Patch2D psi1{patch.half_width, n, std::vector<double>(patch.values.size(), nan)};
  Patch2D psi2 = psi1;
  for (int i = -n + 1; i <= n - 1; ++i) {
    for (int j = -n + 1; j <= n - 1; ++j) {
      const double ux = (patch.at(i + 1, j) - patch.at(i - 1, j)) / (2.0 * h);
      const double uy = (patch.at(i, j + 1) - patch.at(i, j - 1)) / (2.0 * h);
      const double m = std::hypot(ux, uy);
      if (!(m >= grad_floor)) {
        std::ostringstream msg;
        msg << "|grad u| = " << m << " below floor at node (" << i << ", " << j << ")";
        throw DegeneracyError(msg.str());
      }
      const double s = profile.d1(m) / m;
      psi1.at(i, j) = s * ux;
      psi2.at(i, j) = s * uy;
    }
  }
  Patch2D ut{patch.half_width, n, std::vector<double>(patch.values.size(), nan)};
  for (int i = -n + 2; i <= n - 2; ++i)
    for (int j = -n + 2; j <= n - 2; ++j)
      ut.at(i, j) =
          (psi1.at(i + 1, j) - psi1.at(i - 1, j)) / (2.0 * h) + (psi2.at(i, j + 1) - psi2.at(i, j - 1)) / (2.0 * h);
  return ut;
}

}  // namespace pmlab
