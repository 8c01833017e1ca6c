#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quadfit/measure.hpp"
#include "quadfit/random.hpp"

namespace quadfit {

using Theta = std::vector<double>;

/// A regular parametric family g_theta with likelihood scores and an MLE.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual std::string id() const = 0;
  /// p, the number of free parameters.
  virtual std::size_t dimension() const = 0;

  virtual double density(double x, const Theta& theta) const = 0;
  /// u(x; theta), the gradient of log g_theta(x).
  virtual Eigen::VectorXd score(double x, const Theta& theta) const = 0;
  /// J_theta = E_theta[u u'].
  virtual Eigen::MatrixXd information(const Theta& theta) const = 0;
  /// Solves sum_i u(x_i; theta) = 0. Throws FitError on degenerate samples.
  virtual Theta fit_mle(std::span<const double> sample) const = 0;
  /// G_theta as a baseline measure.
  virtual BaselineMeasure baseline(const Theta& theta) const = 0;

  virtual std::vector<double> sample(Rng& rng, std::size_t n, const Theta& theta) const {
    return baseline(theta).sample(rng, n);
  }

  bool discrete() const { return discrete_; }

  /// u*(x) = (1, u(x)')'.
  Eigen::VectorXd extended_score(double x, const Theta& theta) const;
  /// J* = E[u* u*'] = diag(1, J).
  Eigen::MatrixXd extended_information(const Theta& theta) const;

 protected:
  explicit ParametricModel(bool is_discrete) : discrete_(is_discrete) {}

 private:
  bool discrete_;
};

using ModelPtr = std::shared_ptr<const ParametricModel>;

/// N(mu, sigma2); theta = (mu, sigma2).
ModelPtr normal_model();

/// Exponential(rate) on [0, inf); theta = (rate).
ModelPtr exponential_model();

/// Independence model for an r x c contingency table. Observations are cell
/// codes k = i*c + j; theta holds the first r-1 row and the first c-1 column
/// probabilities.
ModelPtr independence_model(std::size_t rows, std::size_t cols);

class IndependenceModel final : public ParametricModel {
 public:
  IndependenceModel(std::size_t rows, std::size_t cols);

  std::string id() const override;
  std::size_t dimension() const override { return rows_ + cols_ - 2; }
  double density(double x, const Theta& theta) const override;
  Eigen::VectorXd score(double x, const Theta& theta) const override;
  Eigen::MatrixXd information(const Theta& theta) const override;
  Theta fit_mle(std::span<const double> sample) const override;
  BaselineMeasure baseline(const Theta& theta) const override;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double code(std::size_t i, std::size_t j) const { return static_cast<double>(i * cols_ + j); }

  /// Classical Pearson X^2 for independence from cell codes.
  double pearson_x2(std::span<const double> sample) const;

 private:
  std::size_t cell(double x) const;
  std::vector<double> row_probs(const Theta& theta) const;
  std::vector<double> col_probs(const Theta& theta) const;

  std::size_t rows_;
  std::size_t cols_;
};

/// Maximum absolute component of sum_i u(x_i; theta).
double score_residual(const ParametricModel& m, std::span<const double> sample, const Theta& theta);

}  // namespace quadfit
