#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "quadfit/centering.hpp"
#include "quadfit/model.hpp"
#include "quadfit/spectral.hpp"

namespace quadfit {

/// P*(x,y) = u*(x)' (J*)^-1 u*(y).
double extended_projection(double x, double y, const ParametricModel& model, const Theta& theta);

/// Two algebraically equivalent constructions of the score-centered kernel:
/// `extended` projects the raw kernel against u* = (1, u) with J*, and
/// `centered` projects the G-centered kernel against u with J.
enum class ScoreRoute { extended, centered };

/// Kernel projected orthogonal to the constants and the likelihood scores
/// of the model at theta, so that
/// integral K_scen(x,y) u*(y) dG_theta(y) = 0 for every x.
class ScoreCenteredKernel {
 public:
  ScoreCenteredKernel(const Kernel& k, ModelPtr model, Theta theta);

  double operator()(double x, double y) const { return evaluate(x, y, ScoreRoute::extended); }
  double evaluate(double x, double y, ScoreRoute route) const;

  /// n x n matrix over a sample.
  Eigen::MatrixXd matrix(std::span<const double> sample, ScoreRoute route = ScoreRoute::extended) const;

  /// A*(y) = integral u*(z) K(z,y) dG(z).
  Eigen::VectorXd extended_kernel_scores(double y) const;
  /// A(y) = integral u(z) K_cen(z,y) dG(z).
  Eigen::VectorXd centered_kernel_scores(double y) const;

  const CenteredKernel& centered() const noexcept { return centered_; }
  const Kernel& base() const noexcept { return centered_.base(); }
  const ParametricModel& model() const noexcept { return *model_; }
  const ModelPtr& model_ptr() const noexcept { return model_; }
  const Theta& theta() const noexcept { return theta_; }
  const BaselineMeasure& baseline() const noexcept { return centered_.center(); }

  /// True when the kernel-score integrals are exact (normal kernel with the
  /// normal model, or a finite-support model).
  bool closed_form() const noexcept { return normal_normal_ || discrete_; }

 private:
  std::size_t support_index(double x) const;

  ModelPtr model_;
  Theta theta_;
  CenteredKernel centered_;
  bool normal_normal_ = false;
  bool discrete_ = false;

  Eigen::MatrixXd jstar_inv_;
  Eigen::MatrixXd j_inv_;
  Eigen::MatrixXd bstar_;  // integral A*(y) u*(y)' dG(y)
  Eigen::MatrixXd b_;      // integral A(y) u(y)' dG(y)

  // Finite-support models: K_scen on the support for both routes.
  std::vector<double> support_;
  Eigen::MatrixXd discrete_extended_;
  Eigen::MatrixXd discrete_centered_;
};

/// (I - P D) K (I - D P) with D = diag(weights), P = S (S' D S)^-1 S' and
/// S = scores (one row per node).
Eigen::MatrixXd discrete_score_center(const Eigen::MatrixXd& k, const Eigen::MatrixXd& scores,
                                      std::span<const double> weights);

enum class SpectrumRoute { automatic, nystrom, quadrature, discrete };

const char* to_string(SpectrumRoute r) noexcept;

struct ScoreSpectrumOptions {
  SpectrumRoute route = SpectrumRoute::automatic;
  std::size_t nystrom_points = 2000;
  std::size_t quadrature_nodes = 64;
  std::uint64_t seed = 0;
  std::size_t max_terms = 512;
};

/// Eigenvalues of K_scen under G_theta. `automatic` picks the exact discrete
/// route for finite-support models and the Monte Carlo Nystrom route
/// otherwise.
SpectralDecomposition score_centered_spectrum(const ScoreCenteredKernel& k, const ScoreSpectrumOptions& options = {});

/// Matrices of the Nystrom route: m draws from G_theta, the raw kernel
/// matrix, the extended scores u*(x_i) as rows, and the centered and
/// score-centered matrices divided by m.
struct NystromMatrices {
  std::vector<double> points;
  Eigen::MatrixXd scores;
  Eigen::MatrixXd centered;
  Eigen::MatrixXd score_centered;
};

NystromMatrices nystrom_matrices(const ScoreCenteredKernel& k, std::size_t m, std::uint64_t seed);

/// Restricts a symmetric matrix to the column span of `directions` and
/// counts the eigenvalues of the restriction below rel * lambda_max(m).
struct SuppressedDirections {
  std::size_t count = 0;
  std::vector<double> restricted;  // eigenvalues of the restriction, ascending
  double lambda_max = 0.0;
};

SuppressedDirections suppressed_directions(const Eigen::MatrixXd& m, const Eigen::MatrixXd& directions,
                                           double rel = 1e-3);

}  // namespace quadfit
