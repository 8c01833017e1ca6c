#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "quadfit/error.hpp"
#include "quadfit/score_centering.hpp"

using namespace quadfit;

namespace {

// Fully specified uniform(0,1): no free parameters.
class FixedUniform final : public ParametricModel {
 public:
  FixedUniform() : ParametricModel(false) {}
  std::string id() const override { return "fixed_uniform"; }
  std::size_t dimension() const override { return 0; }
  double density(double x, const Theta&) const override { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; }
  Eigen::VectorXd score(double, const Theta&) const override { return Eigen::VectorXd(0); }
  Eigen::MatrixXd information(const Theta&) const override { return Eigen::MatrixXd(0, 0); }
  Theta fit_mle(std::span<const double>) const override { return {}; }
  BaselineMeasure baseline(const Theta&) const override { return BaselineMeasure::uniform01(); }
};

std::vector<double> draws(std::uint64_t seed, std::size_t n, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(ExtendedProjection, NoParametersIsConstant) {
  const FixedUniform m;
  EXPECT_DOUBLE_EQ(extended_projection(0.1, 0.8, m, {}), 1.0);
}

TEST(ExtendedProjection, NormalModelFormula) {
  const auto m = normal_model();
  const double mu = 0.5, s2 = 1.8;
  for (double x : {-1.0, 0.3, 2.2})
    for (double y : {-0.4, 1.1}) {
      const double dx = x - mu, dy = y - mu;
      const double expect = 1 + dx * dy / s2 + (dx * dx - s2) * (dy * dy - s2) / (2 * s2 * s2);
      EXPECT_NEAR(extended_projection(x, y, *m, {mu, s2}), expect, 1e-13);
    }
}

TEST(ExtendedProjection, ReproducingIdentity) {
  const auto m = normal_model();
  const Theta th = {-0.3, 0.7};
  const auto rule = normal_rule(th[0], th[1], 64);
  for (double x : draws(1, 20, -3.0, 2.5)) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < rule.size(); ++i)
      acc += rule.weights[i] * extended_projection(x, rule.nodes[i], *m, th) * m->extended_score(rule.nodes[i], th);
    EXPECT_LT((acc - m->extended_score(x, th)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ScoreCenteredKernel, NoParametersReducesToCentering) {
  const ScoreCenteredKernel sck(Kernel::cvm(), std::make_shared<FixedUniform>(), {});
  const auto ck = center_kernel(Kernel::cvm(), BaselineMeasure::uniform01());
  for (double x : {0.05, 0.4, 0.9})
    for (double y : {0.2, 0.6}) {
      EXPECT_NEAR(sck(x, y), ck(x, y), 1e-9);
      EXPECT_NEAR(sck.evaluate(x, y, ScoreRoute::centered), ck(x, y), 1e-9);
    }
}

TEST(ScoreCenteredKernel, NormalNormalOrthogonality) {
  const auto m = normal_model();
  const Theta th = {0.2, 1.3};
  const ScoreCenteredKernel sck(Kernel::normal(0.8), m, th);
  EXPECT_TRUE(sck.closed_form());
  const auto rule = normal_rule(th[0], th[1], 128);
  for (double x : draws(2, 20, -3.0, 3.0)) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < rule.size(); ++i)
      acc += rule.weights[i] * sck(x, rule.nodes[i]) * m->extended_score(rule.nodes[i], th);
    EXPECT_LT(acc.cwiseAbs().maxCoeff(), 1e-6) << x;
  }
}

TEST(ScoreCenteredKernel, ExponentialOrthogonality) {
  const auto m = exponential_model();
  const Theta th = {1.5};
  const ScoreCenteredKernel sck(Kernel::normal(0.5), m, th);
  for (double x : draws(3, 20, 0.0, 3.0)) {
    for (int j = 0; j < 2; ++j) {
      const double v = oracle::simpson(
          [&](double y) { return m->density(y, th) * sck(x, y) * m->extended_score(y, th)(j); }, 0.0, 30.0, 6000);
      EXPECT_LT(std::fabs(v), 1e-6) << x << " " << j;
    }
  }
}

TEST(ScoreCenteredKernel, IndependenceOrthogonality) {
  const auto m = independence_model(2, 3);
  const Theta th = {0.35, 0.2, 0.45};
  const ScoreCenteredKernel sck(Kernel::pearson(), m, th);
  EXPECT_TRUE(sck.closed_form());
  const auto atoms = m->baseline(th).atoms();
  for (double x : atoms.nodes) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(4);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      acc += atoms.weights[i] * sck(x, atoms.nodes[i]) * m->extended_score(atoms.nodes[i], th);
    EXPECT_LT(acc.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ScoreCenteredKernel, RoutesAgree) {
  const std::vector<std::pair<ModelPtr, Theta>> cases = {{normal_model(), {0.1, 0.9}},
                                                         {exponential_model(), {0.8}}};
  for (const auto& [m, th] : cases) {
    const ScoreCenteredKernel sck(Kernel::normal(0.6), m, th);
    const auto xs = draws(4, 10, 0.0, 2.5);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
      EXPECT_NEAR(sck.evaluate(xs[i], xs[i + 1], ScoreRoute::extended),
                  sck.evaluate(xs[i], xs[i + 1], ScoreRoute::centered), 1e-8)
          << m->id();
  }
  const auto ind = independence_model(3, 2);
  const Theta th = {0.2, 0.5, 0.6};
  const ScoreCenteredKernel sck(Kernel::normal(1.0), ind, th);
  for (double x : ind->baseline(th).atoms().nodes)
    for (double y : ind->baseline(th).atoms().nodes)
      EXPECT_NEAR(sck.evaluate(x, y, ScoreRoute::extended), sck.evaluate(x, y, ScoreRoute::centered), 1e-10);
}

TEST(DiscreteScoreCenter, ProjectsOutScores) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  const int n = 7;
  Eigen::MatrixXd a(n, n), s(n, 2);
  for (int i = 0; i < n; ++i) {
    s(i, 0) = 1.0;
    s(i, 1) = z(rng);
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  }
  const Eigen::MatrixXd k = a * a.transpose();
  std::vector<double> w(n, 1.0 / n);
  const auto c = discrete_score_center(k, s, w);
  const Eigen::MatrixXd d = Eigen::VectorXd::Constant(n, 1.0 / n).asDiagonal();
  EXPECT_LT((c * d * s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  // idempotent on an already projected matrix
  EXPECT_LT((discrete_score_center(c, s, w) - c).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(SuppressedDirections, ScoreCenteringRemovesThreeDirections) {
  const ScoreCenteredKernel sck(Kernel::normal(1.0), normal_model(), {0.0, 1.0});
  const auto nm = nystrom_matrices(sck, 400, 17);
  EXPECT_EQ(nm.scores.cols(), 3);
  EXPECT_EQ(suppressed_directions(nm.score_centered, nm.scores).count, 3u);
  EXPECT_EQ(suppressed_directions(nm.centered, nm.scores).count, 1u);
}

TEST(ScoreCenteredSpectrum, RoutesRoughlyAgree) {
  const ScoreCenteredKernel sck(Kernel::normal(1.0), normal_model(), {0.0, 1.0});
  ScoreSpectrumOptions quad;
  quad.route = SpectrumRoute::quadrature;
  ScoreSpectrumOptions nys;
  nys.route = SpectrumRoute::nystrom;
  nys.nystrom_points = 800;
  nys.seed = 5;
  const auto a = score_centered_spectrum(sck, quad);
  const auto b = score_centered_spectrum(sck, nys);
  for (double v : a.eigenvalues) EXPECT_GE(v, 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 0.02);
  EXPECT_THROW(
      [&] {
        ScoreSpectrumOptions d;
        d.route = SpectrumRoute::discrete;
        score_centered_spectrum(sck, d);
      }(),
      InvalidArgument);
}
