#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadfit/centering.hpp"
#include "quadfit/measure.hpp"

namespace quadfit {

/// Ordered (descending) eigenvalues of a kernel under a baseline measure,
/// with eigenfunctions where they are known in closed form and eigenvectors
/// for matrix-based routes.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  /// Closed-form eigenfunctions, parallel to eigenvalues; may be empty.
  std::vector<std::function<double(double)>> eigenfunctions;
  /// Matrix routes: column j holds phi_j at the discretization points,
  /// normalized so that the weighted mean square is one.
  Eigen::MatrixXd eigenvectors;
  std::optional<BaselineMeasure> baseline;
  /// Sum of the eigenvalues dropped by truncation (an upper bound when the
  /// exact remainder is not known).
  double tail_bound = 0.0;
  std::string method;

  std::size_t terms() const noexcept { return eigenvalues.size(); }
  double sum() const;
  double sum_sq() const;
};

/// Constants of the Mehler expansion of the normal kernel K_{h2} under
/// N(0, sigma2). `a` satisfies a^2 - b^2 = 1/(2 sigma2); the `printed_*`
/// fields carry the alternative constants a = sqrt((1-w)^2/(2 h2 w)) and
/// alpha = sqrt(1-w^2)/(2 sqrt(pi) a sigma) for reference.
struct MehlerParameters {
  double h2 = 0.0;
  double sigma2 = 0.0;
  double r = 0.0;      // h2 / sigma2
  double w = 0.0;      // root of r w = (1-w)^2 in (0,1)
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;  // leading eigenvalue
  double beta = 0.0;   // eigenvalue ratio (= w)
  double printed_a = 0.0;
  double printed_alpha = 0.0;
};

MehlerParameters mehler_params(double h2, double sigma2);

/// Truncation policy for geometric spectra: the number of terms n with
/// ratio^n >= 1e-12, capped at 512.
std::size_t geometric_terms(double ratio, std::size_t cap = 512);

/// gamma_n(x) for n = 0..count-1 (orthonormal under N(mean, sigma2)).
std::vector<double> mehler_eigenfunctions(const MehlerParameters& p, std::size_t count, double x,
                                          double mean = 0.0);

/// Spectrum alpha*beta^n, n = 0..terms-1, of K_{h2} under N(mean, sigma2).
SpectralDecomposition normal_spectrum(double h2, double sigma2, std::size_t terms, double mean = 0.0);

/// Poisson kernel spectrum under the uniform measure on [lo, hi): eigenvalue
/// 1 for the constant (omitted when centered) then pairs rho^k, k = 1..pairs,
/// with eigenfunctions sqrt(2) cos(k x), sqrt(2) sin(k x).
SpectralDecomposition poisson_spectrum(double rho, std::size_t pairs, bool centered = true,
                                       double lo = 0.0, double hi = kTwoPi);

/// Centered Cramer–von Mises kernel under uniform(0,1): 1/(j pi)^2 with
/// eigenfunctions sqrt(2) cos(j pi u), j = 1..terms.
SpectralDecomposition cvm_spectrum(std::size_t terms);

/// Spectrum of M/n (the (K, F-hat) decomposition); eigenvectors rescaled so
/// that (1/n) sum phi(x_i)^2 = 1.
SpectralDecomposition empirical_eigs(const EmpiricalKernelMatrix& m);

/// Spectrum of W^{1/2} K W^{1/2} for a kernel matrix over weighted nodes.
SpectralDecomposition weighted_eigs(const Eigen::MatrixXd& k, std::span<const double> weights);

/// Drops eigenvalues below rel_tol * lambda_1 (including small negative
/// values from rounding) and keeps at most `cap`. When `total` is finite the
/// tail bound becomes total - sum(kept), otherwise the dropped sum is added.
SpectralDecomposition truncate_spectrum(SpectralDecomposition s, double rel_tol = 1e-12,
                                        std::size_t cap = 512,
                                        double total = std::numeric_limits<double>::quiet_NaN());

}  // namespace quadfit
