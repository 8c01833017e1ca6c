#include "quadfit/centering.hpp"

#include <cmath>
#include <numbers>

#include "quadfit/error.hpp"

namespace quadfit {

double log_normal_cdf(double z) {
  if (z > -20.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // erfc(t) ~ exp(-t^2) / (t sqrt(pi)) * (1 - 1/(2t^2) + 3/(4t^4) - 15/(8t^6))
  const double t = -z / std::numbers::sqrt2;
  const double t2 = t * t;
  const double series = 1.0 - 1.0 / (2.0 * t2) + 3.0 / (4.0 * t2 * t2) - 15.0 / (8.0 * t2 * t2 * t2);
  return std::log(0.5) - t2 - std::log(t * std::sqrt(std::numbers::pi)) + std::log(series);
}

CenteredKernel::CenteredKernel(Kernel kernel, BaselineMeasure center)
    : kernel_(std::move(kernel)), center_(std::move(center)), rule_(Rule::quadrature) {
  const auto family = kernel_.family();
  if (family == KernelFamily::pearson && !kernel_.bound()) kernel_ = kernel_.bind_reference(center_);
  if ((family == KernelFamily::pearson || family == KernelFamily::identity) && !center_.is_discrete())
    throw DomainError(kernel_.name() + " kernel needs a discrete baseline, got " + center_.describe());

  const auto* normal = center_.as<BaselineMeasure::Normal>();
  const auto* expo = center_.as<BaselineMeasure::Exponential>();
  const auto* interval = center_.as<BaselineMeasure::UniformInterval>();
  const bool circle = center_.as<BaselineMeasure::UniformCircle>() != nullptr;

  if (center_.is_discrete()) {
    rule_ = Rule::finite_sum;
  } else if (family == KernelFamily::normal && normal != nullptr) {
    rule_ = Rule::normal_normal;
  } else if (family == KernelFamily::normal && expo != nullptr) {
    rule_ = Rule::normal_exponential;
  } else if (family == KernelFamily::poisson) {
    // The Poisson kernel integrates to one over its own period.
    const auto [lo, hi] = kernel_.period();
    if (circle && lo == 0.0 && hi == kTwoPi) rule_ = Rule::poisson_uniform;
    if (interval != nullptr && interval->lo == lo && interval->hi == hi) rule_ = Rule::poisson_uniform;
  } else if (family == KernelFamily::cvm && interval != nullptr && interval->lo == 0.0 && interval->hi == 1.0) {
    rule_ = Rule::cvm_uniform;
  }

  switch (rule_) {
    case Rule::normal_normal:
      grand_ = normal_density(0.0, kernel_.bandwidth2() + 2.0 * normal->variance);
      break;
    case Rule::poisson_uniform:
      grand_ = 1.0;
      break;
    case Rule::cvm_uniform:
      grand_ = 1.0 / 3.0;
      break;
    case Rule::finite_sum: {
      const auto rule = center_.atoms();
      grand_ = rule.apply([&](double x) { return one_point(x); });
      break;
    }
    case Rule::normal_exponential:
    case Rule::quadrature:
      grand_ = center_.integrate([&](double x) { return one_point(x); });
      break;
  }
}

double CenteredKernel::one_point(double x) const {
  switch (rule_) {
    case Rule::normal_normal: {
      const auto* g = center_.as<BaselineMeasure::Normal>();
      return normal_density(x - g->mean, kernel_.bandwidth2() + g->variance);
    }
    case Rule::normal_exponential: {
      const double rate = center_.as<BaselineMeasure::Exponential>()->rate;
      const double h2 = kernel_.bandwidth2();
      const double z = (x - rate * h2) / std::sqrt(h2);
      return std::exp(std::log(rate) - rate * x + 0.5 * rate * rate * h2 + log_normal_cdf(z));
    }
    case Rule::poisson_uniform:
      if (!kernel_.in_domain(x)) throw DomainError("poisson kernel: point outside [lo, hi)");
      return 1.0;
    case Rule::cvm_uniform:
      if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cvm kernel: point outside [0, 1]");
      return 0.5 * (1.0 - x * x);
    case Rule::finite_sum: {
      const auto rule = center_.atoms();
      return rule.apply([&](double y) { return kernel_(x, y); });
    }
    case Rule::quadrature: {
      const double cut[] = {x};
      return center_.integrate([&](double y) { return kernel_(x, y); }, cut);
    }
  }
  return 0.0;
}

double CenteredKernel::operator()(double x, double y) const {
  return kernel_(x, y) - one_point(x) - one_point(y) + grand_;
}

Eigen::MatrixXd CenteredKernel::matrix(std::span<const double> sample) const {
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) row(i) = one_point(sample[i]);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i)
      m(i, j) = m(j, i) = kernel_(sample[i], sample[j]) - row(i) - row(j) + grand_;
  return m;
}

CenteredKernel center_kernel(const Kernel& k, const BaselineMeasure& g) { return CenteredKernel(k, g); }

EmpiricalKernelMatrix build_empirical_matrix(const Kernel& k, std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("build_empirical_matrix: empty sample");
  const auto n = static_cast<Eigen::Index>(sample.size());
  EmpiricalKernelMatrix out;
  out.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) out.entries(i, j) = out.entries(j, i) = k(sample[i], sample[j]);
  return out;
}

EmpiricalKernelMatrix empirical_center_matrix(const EmpiricalKernelMatrix& m) {
  if (m.entries.rows() != m.entries.cols() || m.entries.rows() == 0)
    throw InvalidArgument("empirical_center_matrix: need a nonempty square matrix");
  const Eigen::VectorXd row_mean = m.entries.rowwise().mean();
  const Eigen::RowVectorXd col_mean = m.entries.colwise().mean();
  const double grand = row_mean.mean();
  EmpiricalKernelMatrix out;
  out.entries = m.entries;
  out.entries.colwise() -= row_mean;
  out.entries.rowwise() -= col_mean;
  out.entries.array() += grand;
  out.centered = true;
  return out;
}

}  // namespace quadfit
