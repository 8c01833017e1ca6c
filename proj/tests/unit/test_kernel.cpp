#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "quadfit/error.hpp"
#include "quadfit/kernel.hpp"
#include "quadfit/measure.hpp"

using namespace quadfit;

TEST(PoissonKernel, DiagonalAndAntipodalValues) {
  const auto k = Kernel::poisson(0.5);
  EXPECT_NEAR(k(1.0, 1.0), 3.0, 1e-12);
  EXPECT_NEAR(k(0.0, oracle::kPi), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(k(1.0, 1.0), oracle::poisson_series(0.5, 0.0, 60), 1e-12);
  EXPECT_NEAR(k(0.0, oracle::kPi), oracle::poisson_series(0.5, oracle::kPi, 60), 1e-12);
}

TEST(PoissonKernel, MatchesCosineSeriesAtRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (double rho : {0.3, 0.5}) {
    const auto k = Kernel::poisson(rho);
    for (int i = 0; i < 50; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_NEAR(k(a, b), oracle::poisson_series(rho, a - b, 60), 1e-9);
    }
  }
}

TEST(PoissonKernel, DomainAndParameterChecks) {
  EXPECT_THROW(Kernel::poisson(0.0), InvalidArgument);
  EXPECT_THROW(Kernel::poisson(1.0), InvalidArgument);
  const auto k = Kernel::poisson(0.5);
  EXPECT_THROW(k(-0.1, 1.0), DomainError);
  EXPECT_THROW(k(1.0, kTwoPi), DomainError);
}

TEST(PoissonKernel, RescaledIntervalAgreesWithCanonical) {
  const auto k = Kernel::poisson(0.4, 0.0, 1.0);
  const auto c = Kernel::poisson(0.4);
  EXPECT_NEAR(k(0.1, 0.7), c(0.1 * kTwoPi, 0.7 * kTwoPi), 1e-12);
}

TEST(IdentityKernel, Indicator) {
  const auto k = Kernel::identity();
  EXPECT_EQ(k(2.0, 2.0), 1.0);
  EXPECT_EQ(k(2.0, 3.0), 0.0);
}

TEST(PearsonKernel, NeedsBoundPmfAndPositiveMass) {
  const auto unbound = Kernel::pearson();
  EXPECT_FALSE(unbound.bound());
  EXPECT_THROW(unbound(1.0, 1.0), InvalidArgument);
  const auto g = BaselineMeasure::discrete({1.0, 2.0, 3.0}, {0.25, 0.75, 0.0});
  const auto k = Kernel::pearson(g);
  EXPECT_NEAR(k(1.0, 1.0), 4.0, 1e-15);
  EXPECT_EQ(k(1.0, 2.0), 0.0);
  EXPECT_THROW(k(3.0, 3.0), DomainError);
  EXPECT_THROW(Kernel::pearson(BaselineMeasure::normal(0.0, 1.0)), DomainError);
}

TEST(NormalKernel, DensityForm) {
  const auto k = Kernel::normal(2.0);
  EXPECT_NEAR(k(0.5, -0.5), std::exp(-0.25) / std::sqrt(4.0 * oracle::kPi), 1e-15);
  EXPECT_THROW(Kernel::normal(0.0), InvalidArgument);
}

TEST(ConvolveNormal, AddsVariances) {
  EXPECT_DOUBLE_EQ(convolve_normal(1.0, 1.0).bandwidth2(), 2.0);
  EXPECT_THROW(convolve_normal(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(convolve_normal(-1.0, 1.0), InvalidArgument);
  const auto k1 = Kernel::normal(1.0);
  const double lhs = oracle::simpson([&](double z) { return k1(0.0, z) * k1(z, 0.0); }, -20.0, 20.0, 4000);
  EXPECT_NEAR(lhs, 1.0 / (2.0 * std::sqrt(oracle::kPi)), 1e-10);
}

TEST(ConvolveNormal, IdentityOnGrid) {
  const auto k1 = Kernel::normal(0.7);
  const auto k2 = Kernel::normal(1.3);
  const auto k12 = convolve_normal(0.7, 1.3);
  for (double x = -2.0; x <= 2.0; x += 0.5)
    for (double y = -2.0; y <= 2.0; y += 0.5) {
      const double lhs = oracle::simpson([&](double z) { return k1(x, z) * k2(z, y); }, -25.0, 25.0, 6000);
      EXPECT_NEAR(lhs, k12(x, y), 1e-8);
    }
}

TEST(SqrtKernel, HalvesVarianceAndComposes) {
  EXPECT_DOUBLE_EQ(sqrt_kernel(Kernel::normal(2.0)).bandwidth2(), 1.0);
  EXPECT_DOUBLE_EQ(sqrt_kernel(Kernel::normal(1.0)).bandwidth2(), 0.5);
  EXPECT_THROW(sqrt_kernel(Kernel::poisson(0.5)), InvalidArgument);
  const auto root = sqrt_kernel(Kernel::normal(1.0));
  const double lhs = oracle::simpson([&](double r) { return root(0.0, r) * root(r, 1.0); }, -20.0, 20.0, 4000);
  EXPECT_NEAR(lhs, Kernel::normal(1.0)(0.0, 1.0), 1e-10);
}

TEST(CvmKernel, ValuesAndDomain) {
  const auto k = Kernel::cvm();
  EXPECT_DOUBLE_EQ(k(0.2, 0.7), 0.3);
  EXPECT_THROW(k(1.2, 0.5), DomainError);
}

TEST(GaugeShift, ZeroShiftIsIdentical) {
  const auto k = Kernel::normal(1.0);
  const auto s = gauge_shift(k, [](double) { return 0.0; }, 0.0);
  EXPECT_EQ(s.family(), KernelFamily::shifted);
  for (double x : {-1.0, 0.0, 2.5}) EXPECT_EQ(s(x, 0.3), k(x, 0.3));
}

TEST(GaugeShift, AddsTermsWithoutCheckingCnnd) {
  const auto k = Kernel::cvm();
  const auto s = gauge_shift(k, [](double x) { return -10.0 * x * x; }, 3.0);
  EXPECT_NEAR(s(0.2, 0.5), k(0.2, 0.5) - 0.4 - 2.5 + 3.0, 1e-15);
}

TEST(CustomKernel, SpotChecksRejectBadKernels) {
  EXPECT_NO_THROW(Kernel::custom("abs", [](double s, double t) { return -std::fabs(s - t); }, 0.0, 1.0));
  EXPECT_THROW(Kernel::custom("sq", [](double s, double t) { return (s - t) * (s - t); }, 0.0, 1.0),
               InvalidArgument);
  EXPECT_THROW(Kernel::custom("asym", [](double s, double t) { return s; }, 0.0, 1.0), InvalidArgument);
  const auto k = Kernel::custom("abs", [](double s, double t) { return -std::fabs(s - t); }, 0.0, 1.0);
  EXPECT_THROW(k(2.0, 0.0), DomainError);
}

// Symmetry and conditional nonnegative definiteness of every built-in family
// on random point sets of up to 20 points.
TEST(KernelProperties, SymmetryAndCnnd) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 20);
  const auto pmf = BaselineMeasure::discrete({0, 1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.15, 0.25});
  struct Case {
    Kernel k;
    std::function<double()> draw;
  };
  std::uniform_real_distribution<double> circle(0.0, kTwoPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::uniform_int_distribution<int> cell(0, 4);
  std::vector<Case> cases = {
      {Kernel::normal(0.5), [&] { return gauss(rng); }},
      {Kernel::normal(3.0), [&] { return gauss(rng); }},
      {Kernel::poisson(0.3), [&] { return circle(rng); }},
      {Kernel::poisson(0.9), [&] { return circle(rng); }},
      {Kernel::cvm(), [&] { return unit(rng); }},
      {Kernel::identity(), [&] { return static_cast<double>(cell(rng)); }},
      {Kernel::pearson(pmf), [&] { return static_cast<double>(cell(rng)); }},
  };
  for (const auto& c : cases) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> pts(static_cast<std::size_t>(size(rng)));
      for (auto& p : pts) p = c.draw();
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) ASSERT_EQ(c.k(pts[i], pts[j]), c.k(pts[j], pts[i]));
      EXPECT_GE(min_centered_eigenvalue(c.k, pts), -1e-8) << c.k.name();
    }
  }
}
