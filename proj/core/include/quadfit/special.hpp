#pragma once

namespace quadfit {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly so small upper tails keep full relative precision.
double gamma_q(double a, double x);

/// P(chi^2_dof > x); non-integer dof allowed.
double chi_square_sf(double x, double dof);

/// P(N(0,1) > z).
double standard_normal_sf(double z);

}  // namespace quadfit
