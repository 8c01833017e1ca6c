#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace quadfit {

using ScalarFn = std::function<double(double)>;

/// Nodes and weights of a discrete integration rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  double apply(const ScalarFn& f) const;
};

/// Gauss–Hermite rule for the weight exp(-x^2) on the real line. Rules are
/// computed once per size and cached.
const QuadratureRule& gauss_hermite(std::size_t nodes);

/// Gauss–Hermite rule rescaled to the N(mean, variance) probability measure
/// (weights sum to one).
QuadratureRule normal_rule(double mean, double variance, std::size_t nodes = 64);

/// Gauss–Laguerre rule rescaled to the Exponential(rate) probability measure.
/// Nodes whose weight underflows to zero are dropped.
QuadratureRule exponential_rule(double rate, std::size_t nodes = 64);

/// E f(X) for X ~ N(mean, variance) by Gauss–Hermite quadrature.
double normal_expectation(const ScalarFn& f, double mean, double variance,
                          std::size_t nodes = 64);

/// Equally spaced nodes on [lo, hi) with equal weights 1/nodes; the trapezoid
/// rule for periodic integrands.
QuadratureRule periodic_rule(double lo, double hi, std::size_t nodes = 256);

/// Midpoint rule on [lo, hi] normalized to a probability measure.
QuadratureRule midpoint_rule(double lo, double hi, std::size_t nodes);

struct IntegrationOptions {
  double abs_tol = 1e-9;
  std::size_t max_intervals = 2000;
};

/// Globally adaptive Gauss–Kronrod integral of f over [lo, hi], bisecting the
/// panel with the largest error estimate first. Either limit may be
/// infinite. Interior breakpoints (kinks of the integrand) split the range.
/// Throws IntegrationError when the error estimate exceeds the budget.
double integrate(const ScalarFn& f, double lo, double hi,
                 std::span<const double> breakpoints = {},
                 IntegrationOptions options = {});

/// Pairwise (cascade) summation; error grows like O(log n) ulps.
double pairwise_sum(std::span<const double> values);

}  // namespace quadfit
