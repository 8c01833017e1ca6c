#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "quadfit/error.hpp"
#include "quadfit/quadrature.hpp"
#include "quadfit/spectral.hpp"
#include "quadfit/trace.hpp"

using namespace quadfit;

TEST(MehlerParams, RootAtUnitRatio) {
  const auto p = mehler_params(1.0, 1.0);
  EXPECT_NEAR(p.w, (3.0 - std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(p.r * p.w - (1 - p.w) * (1 - p.w), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.beta, p.w);
}

TEST(MehlerParams, RootAndConstraintAcrossRatios) {
  for (double r : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double sigma2 = 1.7;
    const auto p = mehler_params(r * sigma2, sigma2);
    EXPECT_NEAR(p.r * p.w - (1 - p.w) * (1 - p.w), 0.0, 1e-12) << r;
    EXPECT_NEAR(p.a * p.a - p.b * p.b, 1.0 / (2 * sigma2), 1e-12) << r;
    EXPECT_GT(p.w, 0.0);
    EXPECT_LT(p.w, 1.0);
    EXPECT_NEAR(p.alpha, std::sqrt(p.w / (2 * oracle::kPi)) / std::sqrt(sigma2), 1e-15);
  }
  EXPECT_LT(mehler_params(1e6, 1.0).w, 1e-5);
  EXPECT_GT(mehler_params(1e-6, 1.0).w, 0.99);
  EXPECT_GT(mehler_params(0.5, 1.0).w, mehler_params(2.0, 1.0).w);
  EXPECT_THROW(mehler_params(0.0, 1.0), InvalidArgument);
}

TEST(MehlerParams, PrintedConstantsAreKeptForReference) {
  const auto p = mehler_params(1.0, 1.0);
  EXPECT_NEAR(p.printed_a, std::sqrt((1 - p.w) * (1 - p.w) / (2 * p.w)), 1e-15);
  EXPECT_GT(std::fabs(p.printed_a * p.printed_a - p.b * p.b - 0.5), 1e-3);
}

TEST(NormalSpectrum, Orthonormality) {
  for (double sigma2 : {1.0, 2.5}) {
    const auto p = mehler_params(1.0, sigma2);
    const auto rule = normal_rule(0.3, sigma2, 128);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(11, 11);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto g = mehler_eigenfunctions(p, 11, rule.nodes[i], 0.3);
      for (int m = 0; m < 11; ++m)
        for (int n = 0; n < 11; ++n) gram(m, n) += rule.weights[i] * g[m] * g[n];
    }
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(NormalSpectrum, ReconstructsKernel) {
  const auto s = normal_spectrum(1.0, 1.0, 40);
  const auto k = Kernel::normal(1.0);
  for (double x = -2.0; x <= 2.0; x += 0.25)
    for (double y = -2.0; y <= 2.0; y += 0.25) {
      double sum = 0.0;
      for (std::size_t n = 0; n < 40; ++n) sum += s.eigenvalues[n] * s.eigenfunctions[n](x) * s.eigenfunctions[n](y);
      EXPECT_NEAR(sum, k(x, y), 1e-6);
    }
}

TEST(NormalSpectrum, EigenEquationAndTrace) {
  const double h2 = 0.6, sigma2 = 1.4;
  const auto s = normal_spectrum(h2, sigma2, 60);
  EXPECT_NEAR(s.sum() + s.tail_bound, 1.0 / std::sqrt(2 * oracle::kPi * h2), 1e-10);
  const auto k = Kernel::normal(h2);
  const auto rule = normal_rule(0.0, sigma2, 128);
  for (std::size_t n : {0u, 1u, 4u, 9u})
    for (double x : {-1.0, 0.2, 1.5}) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        lhs += rule.weights[i] * k(x, rule.nodes[i]) * s.eigenfunctions[n](rule.nodes[i]);
      EXPECT_NEAR(lhs, s.eigenvalues[n] * s.eigenfunctions[n](x), 1e-9);
    }
}

TEST(NormalSpectrum, HighOrderEigenfunctionsAreFinite) {
  const auto p = mehler_params(1.0, 1.0);
  for (double x : {-8.0, 0.0, 5.0, 30.0}) {
    const auto g = mehler_eigenfunctions(p, 110, x);
    for (double v : g) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(PoissonSpectrum, CenteredEigenvalues) {
  const auto s = poisson_spectrum(0.5, 4, true);
  const std::vector<double> expect = {0.5, 0.5, 0.25, 0.25, 0.125, 0.125, 0.0625, 0.0625};
  ASSERT_EQ(s.eigenvalues.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(s.eigenvalues[i], expect[i]);
  const auto u = poisson_spectrum(0.5, 4, false);
  EXPECT_DOUBLE_EQ(u.eigenvalues.front(), 1.0);
  EXPECT_THROW(poisson_spectrum(1.0, 3), InvalidArgument);
}

TEST(PoissonSpectrum, OrthonormalAndReconstructs) {
  const auto s = poisson_spectrum(0.5, 60, false);
  const auto rule = periodic_rule(0.0, kTwoPi, 512);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      const double ip = rule.apply([&](double x) { return s.eigenfunctions[i](x) * s.eigenfunctions[j](x); });
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-10);
    }
  const auto k = Kernel::poisson(0.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int t = 0; t < 20; ++t) {
    const double a = u(rng), b = u(rng);
    double sum = 0.0;
    for (std::size_t n = 0; n < s.terms(); ++n) sum += s.eigenvalues[n] * s.eigenfunctions[n](a) * s.eigenfunctions[n](b);
    EXPECT_NEAR(sum, k(a, b), 1e-9);
  }
}

TEST(CvmSpectrum, TraceIdentities) {
  const auto s = cvm_spectrum(200);
  EXPECT_NEAR(s.eigenvalues.front(), 1.0 / (oracle::kPi * oracle::kPi), 1e-15);
  EXPECT_NEAR(s.sum() + s.tail_bound, 1.0 / 6.0, 1e-9);
  EXPECT_NEAR(s.sum_sq(), 1.0 / 90.0, 1e-9);
}

TEST(EmpiricalEigs, SimpleMatrices) {
  EmpiricalKernelMatrix id;
  id.entries = Eigen::MatrixXd::Identity(5, 5);
  for (double v : empirical_eigs(id).eigenvalues) EXPECT_NEAR(v, 0.2, 1e-15);
  EmpiricalKernelMatrix c;
  c.entries = Eigen::MatrixXd::Constant(4, 4, 3.0);
  const auto s = empirical_eigs(c);
  EXPECT_NEAR(s.eigenvalues[0], 3.0, 1e-14);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(s.eigenvalues[i], 0.0, 1e-14);
  // eigenvectors normalized to unit mean square
  EXPECT_NEAR(s.eigenvectors.col(0).squaredNorm() / 4.0, 1.0, 1e-12);
}

TEST(EmpiricalEigs, PoissonSampleApproachesSeries) {
  Rng rng(77);
  const auto pts = BaselineMeasure::circle().sample(rng, 500);
  const auto m = build_empirical_matrix(Kernel::poisson(0.5), pts);
  const auto s = empirical_eigs(m);
  const std::vector<double> expect = {1.0, 0.5, 0.5, 0.25, 0.25};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s.eigenvalues[i], expect[i], 0.1);
  EXPECT_NEAR(s.sum(), empirical_traces(m).trace, 1e-10);
}

TEST(WeightedEigs, DiscreteMeasureMatchesDirectSolve) {
  const std::vector<double> w = {0.2, 0.5, 0.3};
  Eigen::MatrixXd k(3, 3);
  k << 2, 1, 0, 1, 3, 1, 0, 1, 2;
  const auto s = weighted_eigs(k, w);
  Eigen::MatrixXd kw = k * Eigen::Vector3d(w[0], w[1], w[2]).asDiagonal();
  Eigen::EigenSolver<Eigen::MatrixXd> es(kw);
  std::vector<double> ev;
  for (int i = 0; i < 3; ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.rbegin(), ev.rend());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.eigenvalues[i], ev[i], 1e-12);
  // phi orthonormal under w
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ip = 0.0;
      for (int r = 0; r < 3; ++r) ip += w[r] * s.eigenvectors(r, i) * s.eigenvectors(r, j);
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-12);
    }
}

TEST(TruncateSpectrum, PolicyAndTail) {
  SpectralDecomposition s;
  for (int n = 0; n < 100; ++n) s.eigenvalues.push_back(std::pow(0.5, n));
  const auto t = truncate_spectrum(s, 1e-12, 512);
  EXPECT_EQ(t.terms(), 40u);  // 0.5^39 >= 1e-12 > 0.5^40
  double dropped = 0.0;
  for (int n = 40; n < 100; ++n) dropped += std::pow(0.5, n);
  EXPECT_NEAR(t.tail_bound, dropped, 1e-20);
  EXPECT_EQ(truncate_spectrum(s, 1e-12, 10).terms(), 10u);
  EXPECT_EQ(geometric_terms(0.5), 40u);
}
