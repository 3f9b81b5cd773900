#pragma once

#include <optional>

#include "pmlab/nonlinearity.hpp"
#include "pmlab/solvers.hpp"

namespace pmlab {

/// u0 = (x + y)/sqrt2 + k1 x^2 + k2 y^2 + h1 x^3 + h2 y^3.
struct TaylorDatum {
  double k1 = 0.0;
  double k2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;

  double value(double x, double y) const;
};

TaylorDatum datum_from_n(int n);

/// v0_y(0,0) = 2 sqrt2 k2.
double dini_condition(const TaylorDatum& d);
/// 8 k1^2 k2^2 + 3 sqrt2 (k1^2 h2 + k2^2 h1); negative means g''(0) > 0.
double convexity_margin(const TaylorDatum& d);
double vt_origin(const TaylorDatum& d, const NonlinearityProfile& profile);

bool both_conditions(const TaylorDatum& d, const NonlinearityProfile& profile);
std::optional<int> find_min_n(const NonlinearityProfile& profile, int n_max);

Patch2D taylor_patch(const TaylorDatum& d, double half_width, int n);

struct CrossCheck {
  double closed_form = 0.0;
  double fd_value = 0.0;
  double rel_err = 0.0;
};

/// v_t(0,0,0) = 2 (u_x u_tx + u_y u_ty) at the origin by centered differences of u_t.
CrossCheck crosscheck_fd(const TaylorDatum& d, const NonlinearityProfile& profile, double half_width, int patch_n);

}  // namespace pmlab
