#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pmlab/errors.hpp"
#include "pmlab/initial_data.hpp"
#include "pmlab/nonlinearity.hpp"
#include "pmlab/solvers.hpp"

using namespace pmlab;

namespace {

const NonlinearityProfile pm = NonlinearityProfile::perona_malik();

Field1D sample(double a, double b, int n, const std::function<double(double)>& f, bool radial = false) {
  return field_from_values(Grid1D::make(a, b, n, radial), f);
}

double phi2(double s) { return (1 - s * s) / ((1 + s * s) * (1 + s * s)); }
double phi1(double s) { return s / (1 + s * s); }

}  // namespace

TEST_CASE("Grid1D validation") {
  CHECK_THROWS_AS(Grid1D::make(0, 1, 7), ConfigError);
  CHECK_THROWS_AS(Grid1D::make(1, 1, 10), ConfigError);
  CHECK_THROWS_AS(Grid1D::make(0, 1, 10, true), DomainError);
  const auto g = Grid1D::make(0.5, 1.5, 100, true);
  CHECK(g.spacing() == doctest::Approx(0.01));
  CHECK(g.node_count() == 101);
  CHECK(g.midpoint_grid().a == doctest::Approx(0.505));
  Field1D bad{g, std::vector<double>(100, 0.0), 0.0};
  CHECK_THROWS_AS(bad.validate(), NumericError);
}

TEST_CASE("rhs_pm1d examples") {
  const auto lin = sample(0, 1, 100, [](double x) { return 0.7 * x; });
  const auto d = rhs_pm1d(lin, pm);
  for (std::size_t i = 1; i + 1 < d.size(); ++i) REQUIRE(std::abs(d[i]) < 1e-12);

  const auto crit = sample(0, 1, 100, [](double x) { return x; });
  const auto dc = rhs_pm1d(crit, pm);
  for (std::size_t i = 1; i + 1 < dc.size(); ++i) REQUIRE(std::abs(dc[i]) < 1e-12);

  // u = x^2/2: node x = 0.5 has u_x = 0.5, u_xx = 1, so u_t = phi''(0.5) = 0.48
  const auto q = sample(0, 1, 1000, [](double x) { return 0.5 * x * x; });
  const auto dq = rhs_pm1d(q, pm);
  CHECK(dq[500] == doctest::Approx(phi2(0.5)).epsilon(1e-5));
  CHECK(phi2(0.5) == doctest::Approx(0.48));

  auto nanf = lin;
  nanf.values[3] = std::nan("");
  CHECK_THROWS_AS(rhs_pm1d(nanf, pm), NumericError);

  const auto dd = rhs_pm1d(q, pm, Boundary::Dirichlet);
  CHECK(dd.front() == 0.0);
  CHECK(dd.back() == 0.0);
}

TEST_CASE("rhs_pm_radial examples") {
  const auto c = sample(0.5, 1.5, 100, [](double) { return 3.0; }, true);
  for (double v : rhs_pm_radial(c, pm, 2)) REQUIRE(v == 0.0);

  const auto r = sample(0.5, 1.5, 100, [](double x) { return x; }, true);
  CHECK(rhs_pm_radial(r, pm, 2)[50] == doctest::Approx(0.5).epsilon(1e-12));

  const auto w = sample(0.5, 1.5, 100, [](double x) { return std::sin(3 * x); }, true);
  const auto a = rhs_pm_radial(w, pm, 1), b = rhs_pm1d(w, pm);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);

  const auto bad = sample(0.0, 1.0, 100, [](double x) { return x; });
  CHECK_THROWS_AS(rhs_pm_radial(bad, pm, 2), DomainError);
}

TEST_CASE("rhs_fbp1 examples") {
  const auto zero = sample(0, 1, 100, [](double) { return 0.0; });
  for (double v : rhs_fbp1(zero, pm)) REQUIRE(v == 0.0);

  const auto bump = sample(0, 1, 100, [](double x) { return 0.25 - (x - 0.5) * (x - 0.5); });
  const double L = -2.0;
  CHECK(rhs_fbp1(bump, pm)[50] == doctest::Approx(0.8080127 * L).epsilon(1e-6));

  auto top = zero;
  top.values[40] = 0.5;
  CHECK_THROWS_AS(rhs_fbp1(top, pm), RangeError);

  // negative values are treated as zero
  auto neg = zero;
  neg.values[10] = -1e-3;
  CHECK(rhs_fbp1(neg, pm)[10] == 0.0);
}

TEST_CASE("rhs_fbp2 examples") {
  const auto zero = sample(0.5, 1.5, 100, [](double) { return 0.0; }, true);
  for (double v : rhs_fbp2(zero, pm)) REQUIRE(v == 0.0);

  const double c = 0.2;
  const auto flat = sample(0.5, 1.5, 100, [&](double) { return c; }, true);
  CHECK(rhs_fbp2(flat, pm)[50] == doctest::Approx(coeff_g(pm, c) * (0.5 - c)).epsilon(1e-12));

  const auto bump = sample(0.5, 1.5, 200, [](double r) { return std::max(0.0, 0.2 - 4 * (r - 1) * (r - 1)); }, true);
  const auto a = rhs_fbp2(bump, pm), b = rhs_fbp1(bump, pm);
  const double h = bump.grid.spacing();
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    const double v = bump.values[i];
    if (v <= 0.0) {
      REQUIRE(a[i] == 0.0);
      continue;
    }
    const double r = bump.grid.node(static_cast<int>(i));
    const double vr = (bump.values[i + 1] - bump.values[i - 1]) / (2 * h);
    const double extra = coeff_g(pm, v) * (vr / r - v / (r * r) + 0.5 / (r * r));
    REQUIRE(a[i] == doctest::Approx(b[i] + extra).epsilon(1e-12));
  }
}

TEST_CASE("step_adaptive time steps") {
  const SemiDiscreteModel fbp(Model::FBP1, Boundary::Neumann, pm);
  const auto zero = sample(0, 1, 100, [](double) { return 0.0; });
  const auto s0 = step_adaptive(zero, fbp, 0.4, 0.01);
  CHECK(s0.dt == 0.01);
  CHECK(s0.field.values == zero.values);

  const SemiDiscreteModel pm1(Model::PM1D, Boundary::Neumann, pm);
  const auto flat = sample(0, 1, 100, [](double) { return 1.0; });
  CHECK(step_adaptive(flat, pm1, 0.4, 1.0).dt == doctest::Approx(4e-5).epsilon(1e-12));

  auto v = zero;
  v.values[50] = 0.25;
  CHECK(step_adaptive(v, fbp, 0.4, 1.0).dt == doctest::Approx(0.4 * 1e-4 / 0.8080127).epsilon(1e-6));
}

TEST_CASE("integrate basics") {
  const auto u0 = field_from_gradient(Grid1D::make(0, 1, 200),
                                      [](double x) { return 0.45 + 0.45 * std::sin(2 * std::numbers::pi * x); });
  RunConfig rc;
  rc.t_end = 0.5;
  rc.snapshot_dt = 0.05;
  const auto traj = integrate(u0, rc, pm);
  CHECK_FALSE(traj.breakdown);
  CHECK(traj.snapshots.back().time == doctest::Approx(0.5));
  CHECK(traj.snapshots.size() == 11);
  const auto t = traj.times();
  for (std::size_t i = 1; i < t.size(); ++i) REQUIRE(t[i] > t[i - 1]);
  CHECK(traj.dt_history.size() == 10);

  rc.t_end = 0.0;
  CHECK(integrate(u0, rc, pm).snapshots.size() == 1);

  rc.t_end = -1.0;
  CHECK_THROWS_AS(integrate(u0, rc, pm), ConfigError);
  rc.t_end = 0.1;
  rc.snapshot_dt = 0.0;
  CHECK_THROWS_AS(integrate(u0, rc, pm), ConfigError);

  RunConfig fc;
  fc.model = Model::FBP1;
  fc.t_end = 0.1;
  const auto high = sample(0, 1, 100, [](double) { return 0.6; });
  CHECK_THROWS_AS(integrate(high, fc, pm), ConfigError);
}

TEST_CASE("integrate records breakdown without throwing") {
  const auto u0 = field_from_gradient(Grid1D::make(0, 1, 200), [](double x) {
    return 1.3 + 0.8 * std::exp(-std::pow((x - 0.5) / 0.05, 2));
  });
  RunConfig rc;
  rc.t_end = 0.2;
  rc.snapshot_dt = 0.01;
  rc.blowup_cap = 2.2;
  const auto traj = integrate(u0, rc, pm);
  REQUIRE(traj.breakdown);
  CHECK(traj.breakdown_reason == "gradient-cap");
  CHECK(traj.breakdown_time > 0.0);
  CHECK(traj.breakdown_time <= 0.2);
  for (const auto& s : traj.snapshots)
    for (double x : s.values) REQUIRE(std::isfinite(x));
}

TEST_CASE("transform_u_to_v examples") {
  for (auto [slope, expect] : {std::pair{1.0, 0.0}, {0.5, 0.1}, {2.0, 0.0}}) {
    const auto u = sample(0, 1, 50, [&](double x) { return slope * x; });
    const auto v = transform_u_to_v(u, pm);
    CHECK(v.values.size() == 50);
    for (double x : v.values) REQUIRE(x == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("S1: PM1D and FBP1 agree through the transform") {
  std::vector<double> errs;
  for (int n : {100, 200}) {
    const auto u0 = field_from_gradient(Grid1D::make(0, 1, n),
                                        [](double x) { return 0.5 + 0.3 * std::sin(2 * std::numbers::pi * x); });
    RunConfig ru;
    ru.boundary = Boundary::Dirichlet;
    ru.t_end = 0.01;
    ru.snapshot_dt = 0.01;
    const auto tu = integrate(u0, ru, pm);
    RunConfig rv = ru;
    rv.model = Model::FBP1;
    rv.boundary = Boundary::Neumann;
    const auto tv = integrate(transform_u_to_v(u0, pm), rv, pm);
    const auto vu = transform_u_to_v(tu.snapshots.back(), pm);
    double e = 0;
    for (std::size_t i = 0; i < vu.values.size(); ++i)
      e = std::max(e, std::abs(vu.values[i] - tv.snapshots.back().values[i]));
    errs.push_back(e);
    CHECK(e <= 1.0 * u0.grid.spacing());
  }
  MESSAGE("S1 max errors: " << errs[0] << ", " << errs[1]);
}

TEST_CASE("S2: Neumann PM1D conserves the sum") {
  const auto u0 = field_from_gradient(Grid1D::make(0, 1, 200), [](double x) {
    return 0.2 + 1.2 * std::exp(-std::pow((x - 0.4) / 0.1, 2));
  });
  const double s0 = std::accumulate(u0.values.begin(), u0.values.end(), 0.0);
  long long steps = 0;
  double worst = 0;
  RunConfig rc;
  rc.t_end = 0.05;
  rc.snapshot_dt = 0.01;
  integrate(u0, rc, pm, [&](double, std::span<const double> u) {
    const double s = std::accumulate(u.begin(), u.end(), 0.0);
    worst = std::max(worst, std::abs(s - s0));
    ++steps;
  });
  const double eps = std::numeric_limits<double>::epsilon();
  CHECK(worst <= 10 * eps * steps * std::max(1.0, std::abs(s0)));
}

TEST_CASE("S3: rhs_pm1d is second order") {
  auto u = [](double x) { return 0.4 * x + 0.05 * std::sin(2 * std::numbers::pi * x); };
  auto exact = [](double x) {
    const double ux = 0.4 + 0.1 * std::numbers::pi * std::cos(2 * std::numbers::pi * x);
    const double uxx = -0.2 * std::numbers::pi * std::numbers::pi * std::sin(2 * std::numbers::pi * x);
    return phi2(ux) * uxx;
  };
  std::vector<double> err;
  for (int n : {40, 80, 160, 320}) {
    const auto f = sample(0, 1, n, u);
    const auto d = rhs_pm1d(f, pm);
    double e = 0;
    for (int i = n / 10; i <= 9 * n / 10; ++i) e = std::max(e, std::abs(d[i] - exact(f.grid.node(i))));
    err.push_back(e);
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.8);
}

TEST_CASE("S4: FBP1 steps do not raise a concave maximum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(0.01, 0.45), ctr(0.3, 0.7), wid(0.05, 0.25);
  const SemiDiscreteModel fbp(Model::FBP1, Boundary::Neumann, pm);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = amp(rng), c = ctr(rng), w = wid(rng);
    auto v = sample(0, 1, 200, [&](double x) { return std::max(0.0, a * (1 - std::pow((x - c) / w, 2))); });
    const double m0 = *std::max_element(v.values.begin(), v.values.end());
    for (int k = 0; k < 20; ++k) v = step_adaptive(v, fbp, 0.4, 1.0).field;
    REQUIRE(*std::max_element(v.values.begin(), v.values.end()) <= m0);
  }
}

TEST_CASE("patch2d_time_derivative") {
  const auto lin = Patch2D::sample(1e-2, 16, [](double x, double y) { return (x + y) / std::numbers::sqrt2; });
  const auto ut = patch2d_time_derivative(lin, pm);
  for (int i = -14; i <= 14; ++i)
    for (int j = -14; j <= 14; ++j) REQUIRE(std::abs(ut.at(i, j)) < 1e-10);
  CHECK(std::isnan(ut.at(16, 0)));

  const auto flat = Patch2D::sample(1e-2, 8, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(patch2d_time_derivative(flat, pm), DegeneracyError);

  // u = F(|x - c|) with c = (-1, 0): along y = 0 it is radial with r = 1 + x
  auto F1 = [](double r) { return 0.5 + 0.4 * r; };
  auto F = [](double r) { return 0.5 * r + 0.2 * r * r; };
  const auto rad = Patch2D::sample(0.05, 32, [&](double x, double y) { return F(std::hypot(x + 1, y)); });
  const auto rt = patch2d_time_derivative(rad, pm);
  const auto line = sample(0.95, 1.05, 64, [&](double r) { return F(r); }, true);
  const auto rr = rhs_pm_radial(line, pm, 2);
  const double h = rad.spacing();
  for (int i = -30; i <= 30; ++i) {
    const double r = 1 + i * h;
    const double exact = phi2(F1(r)) * 0.4 + phi1(F1(r)) / r;
    REQUIRE(std::abs(rt.at(i, 0) - exact) < 5 * h * h);
    REQUIRE(std::abs(rr[static_cast<std::size_t>(i + 32)] - exact) < 5 * h * h);
  }
}
