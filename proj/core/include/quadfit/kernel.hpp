#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "quadfit/measure.hpp"

namespace quadfit {

enum class KernelFamily { normal, poisson, cvm, pearson, identity, shifted, custom };

/// Normal density with the given variance at distance d.
double normal_density(double d, double variance);

/// A symmetric, bounded, conditionally nonnegative definite kernel on a
/// univariate sample space. Kernels are immutable values that share their
/// state, so copies are cheap and safe to read concurrently.
class Kernel {
 public:
  using Fn = std::function<double(double, double)>;

  /// (2*pi*h2)^(-1/2) exp(-(s-t)^2 / (2*h2)) on the real line.
  static Kernel normal(double h2);
  /// Poisson kernel with dispersion rho on [lo, hi), canonically [0, 2*pi).
  static Kernel poisson(double rho, double lo = 0.0, double hi = kTwoPi);
  /// 1 - max(u, v) on [0, 1].
  static Kernel cvm();
  /// Pearson kernel I[s=t]/sqrt(g(s)g(t)); the pmf g is bound later by the
  /// test that supplies the null.
  static Kernel pearson();
  static Kernel pearson(const BaselineMeasure& pmf);
  /// Indicator kernel I[s=t] for discrete spaces.
  static Kernel identity();
  /// User-supplied kernel on [lo, hi]. A 20-point conditional nonnegative
  /// definiteness spot check runs once; failure throws InvalidArgument.
  static Kernel custom(std::string name, Fn fn, double lo, double hi);

  KernelFamily family() const noexcept;
  std::string name() const;

  /// Evaluates K(s, t). Throws DomainError for points outside the space.
  double operator()(double s, double t) const;

  bool in_domain(double x) const noexcept;

  /// Family parameters; throw InvalidArgument on the wrong family.
  double bandwidth2() const;
  double rho() const;
  /// [lo, hi) of a Poisson kernel.
  std::pair<double, double> period() const;
  const BaselineMeasure* reference() const noexcept;
  const Kernel* shifted_base() const noexcept;

  /// Pearson kernels without a pmf are unbound; binding attaches g.
  bool bound() const noexcept;
  Kernel bind_reference(const BaselineMeasure& g) const;

  struct Impl;

 private:
  explicit Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend Kernel gauge_shift(const Kernel&, std::function<double(double)>, double);

  std::shared_ptr<const Impl> impl_;
};

inline double eval_kernel(const Kernel& k, double s, double t) { return k(s, t); }

/// Normal kernel whose variance is the sum of the inputs.
Kernel convolve_normal(double h1_sq, double h2_sq);

/// Square-root kernel; closed form only for the normal family (variance halves).
Kernel sqrt_kernel(const Kernel& k);

/// K*(x,y) = K(x,y) + a(x) + a(y) + b. Generates the same quadratic distance
/// as K but need not be CNND, so no check is applied.
Kernel gauge_shift(const Kernel& base, std::function<double(double)> a, double b);

/// Smallest eigenvalue of the doubly centered Gram matrix on `points`; a
/// value below zero (beyond rounding) certifies a CNND violation.
double min_centered_eigenvalue(const Kernel& k, std::span<const double> points);

}  // namespace quadfit
