#include "quadfit/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadfit/error.hpp"
#include "quadfit/hermite.hpp"
#include "quadfit/quadrature.hpp"

namespace quadfit {

double SpectralDecomposition::sum() const { return pairwise_sum(eigenvalues); }

double SpectralDecomposition::sum_sq() const {
  std::vector<double> sq(eigenvalues.size());
  std::transform(eigenvalues.begin(), eigenvalues.end(), sq.begin(), [](double v) { return v * v; });
  return pairwise_sum(sq);
}

MehlerParameters mehler_params(double h2, double sigma2) {
  if (!(h2 > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("mehler_params: variances must be positive");
  MehlerParameters p;
  p.h2 = h2;
  p.sigma2 = sigma2;
  p.r = h2 / sigma2;
  // Smaller root of w^2 - (2 + r) w + 1 = 0, written to avoid cancellation.
  p.w = 2.0 / (2.0 + p.r + std::sqrt(p.r * p.r + 4.0 * p.r));
  p.b = std::sqrt((1.0 - p.w) / h2);
  p.a = std::sqrt((1.0 - p.w * p.w) / (2.0 * h2 * p.w));
  const double sigma = std::sqrt(sigma2);
  p.alpha = std::sqrt(p.w / (2.0 * std::numbers::pi)) / sigma;
  p.beta = p.w;
  p.printed_a = std::sqrt((1.0 - p.w) * (1.0 - p.w) / (2.0 * h2 * p.w));
  p.printed_alpha = std::sqrt(1.0 - p.w * p.w) / (2.0 * std::sqrt(std::numbers::pi) * p.printed_a * sigma);
  return p;
}

std::size_t geometric_terms(double ratio, std::size_t cap) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("geometric_terms: ratio must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(std::floor(std::log(1e-12) / std::log(ratio))) + 1;
  return std::clamp<std::size_t>(n, 1, cap);
}

std::vector<double> mehler_eigenfunctions(const MehlerParameters& p, std::size_t count, double x, double mean) {
  const double d = x - mean;
  const double norm = 0.5 * std::log(std::numbers::sqrt2 * p.a * std::sqrt(p.sigma2));
  return normalized_hermite(count, p.a * d, -0.5 * p.b * p.b * d * d + norm);
}

SpectralDecomposition normal_spectrum(double h2, double sigma2, std::size_t terms, double mean) {
  if (terms == 0) throw InvalidArgument("normal_spectrum: need at least one term");
  const auto p = mehler_params(h2, sigma2);
  SpectralDecomposition s;
  s.method = "mehler";
  s.baseline = BaselineMeasure::normal(mean, sigma2);
  s.eigenvalues.resize(terms);
  s.eigenfunctions.resize(terms);
  for (std::size_t n = 0; n < terms; ++n) {
    s.eigenvalues[n] = p.alpha * std::pow(p.beta, static_cast<double>(n));
    s.eigenfunctions[n] = [p, n, mean](double x) { return mehler_eigenfunctions(p, n + 1, x, mean)[n]; };
  }
  s.tail_bound = p.alpha * std::pow(p.beta, static_cast<double>(terms)) / (1.0 - p.beta);
  return s;
}

SpectralDecomposition poisson_spectrum(double rho, std::size_t pairs, bool centered, double lo, double hi) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("poisson_spectrum: rho must lie in (0, 1)");
  if (!(lo < hi)) throw InvalidArgument("poisson_spectrum: need lo < hi");
  SpectralDecomposition s;
  s.method = "poisson";
  s.baseline = (lo == 0.0 && hi == kTwoPi) ? BaselineMeasure::circle() : BaselineMeasure::uniform(lo, hi);
  const double scale = kTwoPi / (hi - lo);
  if (!centered) {
    s.eigenvalues.push_back(1.0);
    s.eigenfunctions.emplace_back([](double) { return 1.0; });
  }
  for (std::size_t k = 1; k <= pairs; ++k) {
    const double lambda = std::pow(rho, static_cast<double>(k));
    const double kd = static_cast<double>(k);
    s.eigenvalues.push_back(lambda);
    s.eigenvalues.push_back(lambda);
    s.eigenfunctions.emplace_back([=](double x) { return std::numbers::sqrt2 * std::cos(kd * scale * (x - lo)); });
    s.eigenfunctions.emplace_back([=](double x) { return std::numbers::sqrt2 * std::sin(kd * scale * (x - lo)); });
  }
  s.tail_bound = 2.0 * std::pow(rho, static_cast<double>(pairs + 1)) / (1.0 - rho);
  return s;
}

SpectralDecomposition cvm_spectrum(std::size_t terms) {
  if (terms == 0) throw InvalidArgument("cvm_spectrum: need at least one term");
  SpectralDecomposition s;
  s.method = "cvm";
  s.baseline = BaselineMeasure::uniform01();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t j = 1; j <= terms; ++j) {
    const double jd = static_cast<double>(j);
    s.eigenvalues.push_back(1.0 / (jd * jd * pi2));
    s.eigenfunctions.emplace_back([jd](double u) { return std::numbers::sqrt2 * std::cos(jd * std::numbers::pi * u); });
  }
  // sum_{j>N} 1/(j pi)^2 = (psi'(N+1))/pi^2; the Euler–Maclaurin form is
  // accurate to O(N^-5).
  const double n = static_cast<double>(terms);
  s.tail_bound = (1.0 / n - 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n * n * n) - 1.0 / (30.0 * std::pow(n, 5))) / pi2;
  return s;
}

namespace {

SpectralDecomposition symmetric_eigs(const Eigen::MatrixXd& m, const Eigen::VectorXd& vector_scale,
                                     std::string method) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const auto n = m.rows();
  SpectralDecomposition s;
  s.method = std::move(method);
  s.eigenvalues.resize(static_cast<std::size_t>(n));
  s.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = n - 1 - j;  // ascending -> descending
    s.eigenvalues[static_cast<std::size_t>(j)] = solver.eigenvalues()(src);
    s.eigenvectors.col(j) = solver.eigenvectors().col(src).cwiseProduct(vector_scale);
  }
  return s;
}

}  // namespace

SpectralDecomposition empirical_eigs(const EmpiricalKernelMatrix& m) {
  const auto n = m.entries.rows();
  if (n == 0 || m.entries.cols() != n) throw InvalidArgument("empirical_eigs: need a nonempty square matrix");
  const double nd = static_cast<double>(n);
  return symmetric_eigs(m.entries / nd, Eigen::VectorXd::Constant(n, std::sqrt(nd)), "empirical");
}

SpectralDecomposition weighted_eigs(const Eigen::MatrixXd& k, std::span<const double> weights) {
  const auto n = k.rows();
  if (n == 0 || k.cols() != n || static_cast<std::size_t>(n) != weights.size())
    throw InvalidArgument("weighted_eigs: dimension mismatch");
  Eigen::VectorXd root(n);
  Eigen::VectorXd inv_root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights[static_cast<std::size_t>(i)] > 0.0)) throw InvalidArgument("weighted_eigs: weights must be positive");
    root(i) = std::sqrt(weights[static_cast<std::size_t>(i)]);
    inv_root(i) = 1.0 / root(i);
  }
  const Eigen::MatrixXd scaled = root.asDiagonal() * k * root.asDiagonal();
  return symmetric_eigs(scaled, inv_root, "quadrature");
}

SpectralDecomposition truncate_spectrum(SpectralDecomposition s, double rel_tol, std::size_t cap, double total) {
  double dropped = 0.0;
  std::size_t keep = 0;
  const double lead = s.eigenvalues.empty() ? 0.0 : s.eigenvalues.front();
  while (keep < s.eigenvalues.size() && keep < cap && s.eigenvalues[keep] > rel_tol * lead && s.eigenvalues[keep] > 0.0)
    ++keep;
  for (std::size_t j = keep; j < s.eigenvalues.size(); ++j) dropped += std::max(0.0, s.eigenvalues[j]);
  s.eigenvalues.resize(keep);
  if (!s.eigenfunctions.empty()) s.eigenfunctions.resize(std::min(keep, s.eigenfunctions.size()));
  if (s.eigenvectors.cols() > static_cast<Eigen::Index>(keep))
    s.eigenvectors.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(keep));
  if (std::isfinite(total))
    s.tail_bound = std::max(0.0, total - s.sum());
  else
    s.tail_bound += dropped;
  return s;
}

}  // namespace quadfit
