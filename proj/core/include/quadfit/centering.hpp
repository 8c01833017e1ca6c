#pragma once

#include <Eigen/Core>
#include <span>

#include "quadfit/kernel.hpp"
#include "quadfit/measure.hpp"

namespace quadfit {

/// K_cen(x,y) = K(x,y) - K(x,G) - K(G,y) + K(G,G). Integrates to zero in
/// either argument against G.
class CenteredKernel {
 public:
  CenteredKernel(Kernel kernel, BaselineMeasure center);

  double operator()(double x, double y) const;

  /// K(x, G) = integral of K(x, y) dG(y).
  double one_point(double x) const;
  /// K(G, G).
  double grand() const noexcept { return grand_; }

  const Kernel& base() const noexcept { return kernel_; }
  const BaselineMeasure& center() const noexcept { return center_; }

  /// True when K(x,G) and K(G,G) are evaluated exactly (closed form or a
  /// finite sum) rather than by quadrature.
  bool closed_form() const noexcept { return rule_ != Rule::quadrature; }

  /// n x n matrix of K_cen over the sample.
  Eigen::MatrixXd matrix(std::span<const double> sample) const;

 private:
  enum class Rule { normal_normal, normal_exponential, poisson_uniform, cvm_uniform, finite_sum, quadrature };

  Kernel kernel_;
  BaselineMeasure center_;
  Rule rule_;
  double grand_ = 0.0;
};

CenteredKernel center_kernel(const Kernel& k, const BaselineMeasure& g);

/// n x n matrix of pairwise kernel values over a sample.
struct EmpiricalKernelMatrix {
  Eigen::MatrixXd entries;
  bool centered = false;

  std::size_t n() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

EmpiricalKernelMatrix build_empirical_matrix(const Kernel& k, std::span<const double> sample);

/// (I - P1) M (I - P1) with P1 the projection onto constant vectors.
EmpiricalKernelMatrix empirical_center_matrix(const EmpiricalKernelMatrix& m);

/// log Phi(z), accurate far into the lower tail.
double log_normal_cdf(double z);

}  // namespace quadfit
