#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "quadfit/spectral.hpp"

namespace quadfit {

/// chi*(lambda) = sum lambda_i Z_i^2, or the centered form
/// sum lambda_i (Z_i^2 - 1).
struct ChiStarDistribution {
  std::vector<double> weights;  // descending, >= 0
  double tail_mean = 0.0;       // mass of truncated weights, added as a constant
  bool centered = false;

  ChiStarDistribution() = default;
  ChiStarDistribution(std::vector<double> w, double tail = 0.0, bool centered_form = false);

  /// The centered form ignores the tail bound, which only shifts the mean.
  static ChiStarDistribution from_spectrum(const SpectralDecomposition& s, bool centered_form = false);

  double mean() const;
  double variance() const;
};

inline constexpr std::size_t kDefaultChiStarDraws = 200000;

/// i.i.d. draws. Draws are generated in fixed blocks with derived sub-seeds,
/// so the output depends only on (weights, draws, seed).
std::vector<double> sample_chi_star(const ChiStarDistribution& d, std::size_t draws, std::uint64_t seed,
                                    std::size_t workers = 0);

struct TailProbability {
  double p = 0.0;
  double mc_se = 0.0;
};

/// Sorted chi-star sample; answers many tail queries from one simulation.
class ChiStarTail {
 public:
  ChiStarTail(const ChiStarDistribution& d, std::size_t draws, std::uint64_t seed, std::size_t workers = 0);

  /// Fraction of draws strictly greater than x, with its binomial s.e.
  TailProbability operator()(double x) const;
  /// Empirical quantile at `level`, linearly interpolated.
  double quantile(double level) const;

  std::size_t draws() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

TailProbability chi_star_tail(const ChiStarDistribution& d, double x, std::size_t draws, std::uint64_t seed);

/// P(chi^2_dof > scale * x).
double satterthwaite_tail(double x, double scale, double dof);

/// P(N(mean, variance) > x).
double normal_tail(double x, double mean, double variance);

}  // namespace quadfit
