#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadfit/chi_star.hpp"
#include "quadfit/distance.hpp"
#include "quadfit/dof.hpp"
#include "quadfit/model.hpp"
#include "quadfit/score_centering.hpp"

namespace quadfit {

struct PValueMethods {
  bool spectral = true;
  bool satterthwaite = true;
  bool bootstrap = false;
};

struct GofOptions {
  Estimator estimator = Estimator::v_stat;
  PValueMethods methods;
  std::size_t draws = kDefaultChiStarDraws;
  std::size_t bootstrap_replicates = 500;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  /// Simple nulls without a closed-form spectrum, and all composite nulls.
  ScoreSpectrumOptions spectrum;
  /// Cap on eigenvalues kept from closed-form spectra.
  std::size_t max_terms = 512;
};

struct BootstrapResult {
  double p = 1.0;
  double se = 0.0;
  std::size_t replicates = 0;
  std::size_t discarded = 0;
};

struct GofTestResult {
  Estimator estimator = Estimator::v_stat;
  std::size_t n = 0;
  /// n V_n, or sqrt(n(n-1)) U_n for the U route.
  double statistic = 0.0;
  double v_stat = 0.0;
  double u_stat = 0.0;  // NaN when n < 2

  double trace = 0.0;
  double trace_sq = 0.0;
  double scale = 0.0;
  double dof = 0.0;
  std::string trace_method;
  DofRange heuristic;

  std::optional<TailProbability> spectral;
  std::optional<double> satterthwaite;
  std::optional<BootstrapResult> bootstrap;
  /// True when the U route fell back to a normal reference because the
  /// trace diverges.
  bool normal_reference = false;

  SpectralDecomposition spectrum;
  Theta theta;
  std::string null_description;
  std::string kernel;
};

/// Simple null: centered kernel, spectrum and chi-star reference are built
/// once and reused for every sample tested.
class SimpleNullTest {
 public:
  SimpleNullTest(const Kernel& k, BaselineMeasure g, GofOptions options = {});

  GofTestResult operator()(std::span<const double> sample) const;

  /// The test statistic alone (n V_n or sqrt(n(n-1)) U_n).
  double statistic(std::span<const double> sample) const;

  const CenteredKernel& kernel() const noexcept { return centered_; }
  const SpectralDecomposition& spectrum() const noexcept { return spectrum_; }
  const TraceEstimates& traces() const noexcept { return traces_; }

 private:
  CenteredKernel centered_;
  GofOptions options_;
  SpectralDecomposition spectrum_;
  TraceEstimates traces_;
  std::optional<ChiStarTail> reference_;
};

GofTestResult simple_null_test(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k,
                               const GofOptions& options = {});

/// Composite null: theta is fitted by maximum likelihood and the statistic
/// is n times the double F-hat integral of the score-centered kernel at
/// theta-hat. With MLE plug-in the U statistic is no longer an unbiased
/// estimator of the distance.
GofTestResult composite_null_test(std::span<const double> sample, const ModelPtr& model, const Kernel& k,
                                  const GofOptions& options = {});

/// Composite statistic at a given theta.
double composite_statistic(std::span<const double> sample, const ScoreCenteredKernel& k, Estimator e);

/// Parametric bootstrap with p = (1 + #{T* >= T}) / (B + 1). Replicates whose
/// sampler or fit fails are discarded; more than 5% discarded aborts.
BootstrapResult bootstrap_pvalue(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k,
                                 std::size_t replicates, std::uint64_t seed, Estimator e = Estimator::v_stat,
                                 std::size_t workers = 0);
/// Composite version: theta-hat-star is refitted in every replicate.
BootstrapResult bootstrap_pvalue(std::span<const double> sample, const ModelPtr& model, const Kernel& k,
                                 std::size_t replicates, std::uint64_t seed, Estimator e = Estimator::v_stat,
                                 std::size_t workers = 0);

/// Spectrum of the G-centered kernel: closed forms for Poisson/uniform and
/// Cramer–von Mises/uniform(0,1), exact weighted eigenvalues for finite
/// supports, quadrature nodes where the measure has a deterministic
/// discretization, and Monte Carlo Nystrom draws otherwise.
SpectralDecomposition null_spectrum(const CenteredKernel& k, const ScoreSpectrumOptions& options = {},
                                    std::size_t max_terms = 512);

}  // namespace quadfit
