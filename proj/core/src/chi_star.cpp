#include "quadfit/chi_star.hpp"

#include <algorithm>
#include <cmath>

#include "quadfit/error.hpp"
#include "quadfit/parallel.hpp"
#include "quadfit/quadrature.hpp"
#include "quadfit/random.hpp"
#include "quadfit/special.hpp"

namespace quadfit {

namespace {
constexpr std::size_t kBlock = 4096;
}

ChiStarDistribution::ChiStarDistribution(std::vector<double> w, double tail, bool centered_form)
    : weights(std::move(w)), tail_mean(tail), centered(centered_form) {
  for (double l : weights)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("chi-star weights must be finite and >= 0");
  if (!(tail_mean >= 0.0) || !std::isfinite(tail_mean)) throw InvalidArgument("chi-star tail mean must be finite and >= 0");
  std::sort(weights.begin(), weights.end(), std::greater<>());
}

ChiStarDistribution ChiStarDistribution::from_spectrum(const SpectralDecomposition& s, bool centered_form) {
  std::vector<double> w;
  w.reserve(s.eigenvalues.size());
  for (double l : s.eigenvalues) w.push_back(std::max(l, 0.0));
  return ChiStarDistribution(std::move(w), centered_form ? 0.0 : s.tail_bound, centered_form);
}

double ChiStarDistribution::mean() const {
  if (centered) return 0.0;
  return pairwise_sum(weights) + tail_mean;
}

double ChiStarDistribution::variance() const {
  std::vector<double> sq(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) sq[i] = weights[i] * weights[i];
  return 2.0 * pairwise_sum(sq);
}

std::vector<double> sample_chi_star(const ChiStarDistribution& d, std::size_t draws, std::uint64_t seed,
                                    std::size_t workers) {
  if (draws == 0) throw InvalidArgument("sample_chi_star: draws must be >= 1");
  if (d.weights.empty()) throw InvalidArgument("sample_chi_star: empty weights");
  std::vector<double> out(draws);
  const std::size_t blocks = (draws + kBlock - 1) / kBlock;
  const double shift = d.centered ? -pairwise_sum(d.weights) : d.tail_mean;
  parallel_for(
      blocks,
      [&](std::size_t b) {
        Rng rng = make_rng(seed, streams::chi_star, b);
        std::normal_distribution<double> z;
        const std::size_t end = std::min(draws, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) {
          double s = 0.0;
          for (double l : d.weights) {
            const double v = z(rng);
            s += l * v * v;
          }
          out[i] = s + shift;
        }
      },
      workers);
  return out;
}

ChiStarTail::ChiStarTail(const ChiStarDistribution& d, std::size_t draws, std::uint64_t seed, std::size_t workers)
    : sorted_(sample_chi_star(d, draws, seed, workers)) {
  std::sort(sorted_.begin(), sorted_.end());
}

TailProbability ChiStarTail::operator()(double x) const {
  const auto above = static_cast<double>(sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), x));
  const double n = static_cast<double>(sorted_.size());
  TailProbability t;
  t.p = above / n;
  t.mc_se = std::sqrt(t.p * (1.0 - t.p) / n);
  return t;
}

double ChiStarTail::quantile(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("ChiStarTail::quantile: level must lie in (0, 1)");
  const double pos = level * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted_.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted_[lo] * (1.0 - f) + sorted_[hi] * f;
}

TailProbability chi_star_tail(const ChiStarDistribution& d, double x, std::size_t draws, std::uint64_t seed) {
  if (draws < 1000) throw InvalidArgument("chi_star_tail: need at least 1000 draws");
  return ChiStarTail(d, draws, seed)(x);
}

double satterthwaite_tail(double x, double scale, double dof) {
  if (!(scale > 0.0) || !(dof > 0.0) || !std::isfinite(scale) || !std::isfinite(dof))
    throw InvalidArgument("satterthwaite_tail: scale and dof must be positive");
  return chi_square_sf(scale * x, dof);
}

double normal_tail(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("normal_tail: variance must be positive");
  return standard_normal_sf((x - mean) / std::sqrt(variance));
}

}  // namespace quadfit
