#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quadfit/quadrature.hpp"
#include "quadfit/random.hpp"

namespace quadfit {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// The measure against which centering, traces and spectra are taken.
class BaselineMeasure {
 public:
  struct Normal {
    double mean;
    double variance;
  };
  struct Exponential {
    double rate;
  };
  struct Discrete {
    std::vector<double> support;  // strictly increasing
    std::vector<double> probs;
  };
  struct UniformInterval {
    double lo;
    double hi;
  };
  struct UniformCircle {};
  struct Empirical {
    std::vector<double> points;
  };
  using Kind = std::variant<Normal, Exponential, Discrete, UniformInterval, UniformCircle, Empirical>;

  static BaselineMeasure normal(double mean, double variance);
  static BaselineMeasure exponential(double rate);
  /// Support points need not be sorted but must be distinct; probabilities
  /// must be nonnegative and sum to one within 1e-12.
  static BaselineMeasure discrete(std::vector<double> support, std::vector<double> probs);
  static BaselineMeasure uniform(double lo, double hi);
  static BaselineMeasure uniform01() { return uniform(0.0, 1.0); }
  /// Uniform on [0, 2*pi).
  static BaselineMeasure circle();
  static BaselineMeasure empirical(std::vector<double> points);

  const Kind& kind() const noexcept { return *kind_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(kind_.get());
  }

  /// Finite-support measures (discrete pmf or empirical sample).
  bool is_discrete() const noexcept;

  /// True for the closed sample space of the measure (support for discrete).
  bool contains(double x) const noexcept;

  /// Interval hull of the support.
  double lower() const noexcept;
  double upper() const noexcept;

  /// Mass at x for finite-support measures; zero otherwise.
  double mass(double x) const noexcept;

  /// Atoms of a finite-support measure (support, probabilities). For an
  /// empirical measure repeated points keep separate atoms of mass 1/n.
  QuadratureRule atoms() const;

  /// Integral of f dM: exact sums for finite supports, Gauss–Hermite (64
  /// nodes) for normal, a 256-point periodic rule on the circle and adaptive
  /// Gauss–Kronrod otherwise. Breakpoints mark kinks of f.
  double integrate(const ScalarFn& f, std::span<const double> breakpoints = {}) const;

  /// Deterministic discretization used by quadrature-based spectra.
  std::optional<QuadratureRule> discretization(std::size_t nodes) const;

  std::vector<double> sample(Rng& rng, std::size_t count) const;

  std::string describe() const;

 private:
  explicit BaselineMeasure(Kind kind) : kind_(std::make_shared<const Kind>(std::move(kind))) {}

  std::shared_ptr<const Kind> kind_;
};

}  // namespace quadfit
