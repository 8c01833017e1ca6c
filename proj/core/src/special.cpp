#include "quadfit/special.hpp"

#include <cmath>
#include <limits>

#include "quadfit/error.hpp"

namespace quadfit {

namespace {

constexpr double kRelTol = 1e-12;
constexpr int kMaxIter = 100000;

// P(a, x) by the power series; valid and fast for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kRelTol * 1e-2)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericalError("gamma_p: series did not converge");
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kRelTol * 1e-2) return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw NumericalError("gamma_q: continued fraction did not converge");
}

void check(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("incomplete gamma: shape must be positive");
  if (std::isnan(x)) throw InvalidArgument("incomplete gamma: x is NaN");
}

}  // namespace

double gamma_p(double a, double x) {
  check(a, x);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  check(a, x);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("chi_square_sf: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * x);
}

double standard_normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace quadfit
