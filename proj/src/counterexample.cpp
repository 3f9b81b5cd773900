#include "pmlab/counterexample.hpp"

#include <cmath>

#include "pmlab/errors.hpp"

namespace pmlab {

namespace {

const double sqrt2 = std::sqrt(2.0);

}  // namespace

double TaylorDatum::value(double x, double y) const {
  return (x + y) / sqrt2 + k1 * x * x + k2 * y * y + h1 * x * x * x + h2 * y * y * y;
}

TaylorDatum datum_from_n(int n) {
  if (n < 1) throw DomainError("n must be >= 1");
  const double m = n;
  return TaylorDatum{m, 1.0, m * m * m, -m * m};
}

double dini_condition(const TaylorDatum& d) { return 2.0 * sqrt2 * d.k2; }

double convexity_margin(const TaylorDatum& d) {
  return 8.0 * d.k1 * d.k1 * d.k2 * d.k2 + 3.0 * sqrt2 * (d.k1 * d.k1 * d.h2 + d.k2 * d.k2 * d.h1);
}

double vt_origin(const TaylorDatum& d, const NonlinearityProfile& profile) {
  const double s = d.k1 + d.k2;
  return profile.dphi_critical() *
             (3.0 * sqrt2 * (d.h1 + d.h2) + 4.0 * d.k1 * d.k2 - 6.0 * d.k1 * d.k1 - 6.0 * d.k2 * d.k2) +
         2.0 * profile.d3phi_critical() * s * s;
}

bool both_conditions(const TaylorDatum& d, const NonlinearityProfile& profile) {
  return dini_condition(d) > 0.0 && convexity_margin(d) < 0.0 && vt_origin(d, profile) > 0.0;
}

std::optional<int> find_min_n(const NonlinearityProfile& profile, int n_max) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  for (int n = 1; n <= n_max; ++n)
    if (both_conditions(datum_from_n(n), profile)) return n;
  return std::nullopt;
}

Patch2D taylor_patch(const TaylorDatum& d, double half_width, int n) {
  return Patch2D::sample(half_width, n, [&](double x, double y) { return d.value(x, y); });
}

CrossCheck crosscheck_fd(const TaylorDatum& d, const NonlinearityProfile& profile, double half_width, int patch_n) {
  if (!(half_width > 0.0 && half_width <= 1e-2)) throw DomainError("patch half_width must lie in (0, 1e-2]");
  const Patch2D u = taylor_patch(d, half_width, patch_n);
  const Patch2D ut = patch2d_time_derivative(u, profile);
  const double h = u.spacing();
  const double ux = (u.at(1, 0) - u.at(-1, 0)) / (2.0 * h);
  const double uy = (u.at(0, 1) - u.at(0, -1)) / (2.0 * h);
  const double utx = (ut.at(1, 0) - ut.at(-1, 0)) / (2.0 * h);
  const double uty = (ut.at(0, 1) - ut.at(0, -1)) / (2.0 * h);
  CrossCheck c;
  c.closed_form = vt_origin(d, profile);
  c.fd_value = 2.0 * (ux * utx + uy * uty);
  const double diff = std::abs(c.fd_value - c.closed_form);
  c.rel_err = std::abs(c.closed_form) > 0.0 ? diff / std::abs(c.closed_form) : diff;
  return c;
}

}  // namespace pmlab
