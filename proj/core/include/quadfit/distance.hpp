#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>

#include "quadfit/centering.hpp"
#include "quadfit/kernel.hpp"
#include "quadfit/measure.hpp"

namespace quadfit {

enum class Estimator { exact, v_stat, u_stat };

const char* to_string(Estimator e) noexcept;

struct DistanceEstimate {
  double value = 0.0;
  Estimator estimator = Estimator::exact;
  std::size_t n = 0;
  std::string kernel;
  std::string null_measure;
};

/// d_K(F, G) for finite-support F and G by the exact double sum over the
/// signed measure F - G.
double quadratic_distance(const BaselineMeasure& f, const BaselineMeasure& g, const Kernel& k);

/// V_n = 1' K_cen 1 / n^2 = d_K(F-hat, G).
DistanceEstimate v_stat(std::span<const double> sample, const CenteredKernel& k);
DistanceEstimate v_stat(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k);

/// U_n = sum_{i != j} K_cen(x_i, x_j) / (n (n-1)); requires n >= 2.
DistanceEstimate u_stat(std::span<const double> sample, const CenteredKernel& k);
DistanceEstimate u_stat(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k);

/// V, U and the diagonal mean of a kernel matrix from a single pass.
struct MatrixMeans {
  double v = 0.0;         // 1' M 1 / n^2
  double u = 0.0;         // off-diagonal mean (NaN when n < 2)
  double diagonal = 0.0;  // sum of the diagonal / n
};
MatrixMeans matrix_means(const Eigen::MatrixXd& m);

/// Closed-form d_K(F-hat, N(mu, sigma2)) for the normal kernel K_{h2}.
double normal_model_distance(std::span<const double> sample, double mu, double sigma2, double h2);

/// Integral of (f* - g*)^2 dz where f*, g* are F, G smoothed through the
/// square-root kernel. Normal kernels only; F and G finite-support.
double smoothed_l2_distance(const BaselineMeasure& f, const BaselineMeasure& g, const Kernel& k);

}  // namespace quadfit
