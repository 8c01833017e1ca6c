#include "quadfit/model.hpp"

#include <cmath>
#include <numbers>

#include "quadfit/error.hpp"
#include "quadfit/quadrature.hpp"

namespace quadfit {

Eigen::VectorXd ParametricModel::extended_score(double x, const Theta& theta) const {
  const auto u = score(x, theta);
  Eigen::VectorXd out(u.size() + 1);
  out(0) = 1.0;
  out.tail(u.size()) = u;
  return out;
}

Eigen::MatrixXd ParametricModel::extended_information(const Theta& theta) const {
  const auto j = information(theta);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(j.rows() + 1, j.cols() + 1);
  out(0, 0) = 1.0;
  out.bottomRightCorner(j.rows(), j.cols()) = j;
  return out;
}

namespace {

void require_size(const Theta& theta, std::size_t p, const std::string& who) {
  if (theta.size() != p) throw InvalidArgument(who + ": expected " + std::to_string(p) + " parameters");
}

class NormalModel final : public ParametricModel {
 public:
  NormalModel() : ParametricModel(false) {}

  std::string id() const override { return "normal"; }
  std::size_t dimension() const override { return 2; }

  double density(double x, const Theta& t) const override {
    check(t);
    const double d = x - t[0];
    return std::exp(-0.5 * d * d / t[1]) / std::sqrt(2.0 * std::numbers::pi * t[1]);
  }

  Eigen::VectorXd score(double x, const Theta& t) const override {
    check(t);
    const double d = x - t[0];
    Eigen::VectorXd u(2);
    u << d / t[1], (d * d - t[1]) / (2.0 * t[1] * t[1]);
    return u;
  }

  Eigen::MatrixXd information(const Theta& t) const override {
    check(t);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
    j(0, 0) = 1.0 / t[1];
    j(1, 1) = 1.0 / (2.0 * t[1] * t[1]);
    return j;
  }

  Theta fit_mle(std::span<const double> s) const override {
    if (s.size() < 2) throw FitError("normal MLE needs at least two observations");
    std::vector<double> v(s.begin(), s.end());
    for (double x : v)
      if (!std::isfinite(x)) throw FitError("normal MLE: non-finite observation");
    const double n = static_cast<double>(v.size());
    const double mean = pairwise_sum(v) / n;
    for (double& x : v) x = (x - mean) * (x - mean);
    const double var = pairwise_sum(v) / n;
    if (!(var > 1e-14 * std::max(1.0, mean * mean)))
      throw FitError("normal MLE: sample variance is zero (singular fit)");
    return {mean, var};
  }

  BaselineMeasure baseline(const Theta& t) const override {
    check(t);
    return BaselineMeasure::normal(t[0], t[1]);
  }

 private:
  static void check(const Theta& t) {
    require_size(t, 2, "normal model");
    if (!(t[1] > 0.0)) throw DomainError("normal model: variance must be positive");
  }
};

class ExponentialModel final : public ParametricModel {
 public:
  ExponentialModel() : ParametricModel(false) {}

  std::string id() const override { return "exponential"; }
  std::size_t dimension() const override { return 1; }

  double density(double x, const Theta& t) const override {
    check(t);
    return x < 0.0 ? 0.0 : t[0] * std::exp(-t[0] * x);
  }

  Eigen::VectorXd score(double x, const Theta& t) const override {
    check(t);
    Eigen::VectorXd u(1);
    u << 1.0 / t[0] - x;
    return u;
  }

  Eigen::MatrixXd information(const Theta& t) const override {
    check(t);
    Eigen::MatrixXd j(1, 1);
    j << 1.0 / (t[0] * t[0]);
    return j;
  }

  Theta fit_mle(std::span<const double> s) const override {
    if (s.empty()) throw FitError("exponential MLE: empty sample");
    for (double x : s)
      if (!(x >= 0.0) || !std::isfinite(x)) throw FitError("exponential MLE: observations must be finite and >= 0");
    const double mean = pairwise_sum(s) / static_cast<double>(s.size());
    if (!(mean > 0.0)) throw FitError("exponential MLE: all observations are zero (singular fit)");
    return {1.0 / mean};
  }

  BaselineMeasure baseline(const Theta& t) const override {
    check(t);
    return BaselineMeasure::exponential(t[0]);
  }

 private:
  static void check(const Theta& t) {
    require_size(t, 1, "exponential model");
    if (!(t[0] > 0.0)) throw DomainError("exponential model: rate must be positive");
  }
};

}  // namespace

ModelPtr normal_model() { return std::make_shared<NormalModel>(); }
ModelPtr exponential_model() { return std::make_shared<ExponentialModel>(); }
ModelPtr independence_model(std::size_t rows, std::size_t cols) {
  return std::make_shared<IndependenceModel>(rows, cols);
}

IndependenceModel::IndependenceModel(std::size_t rows, std::size_t cols)
    : ParametricModel(true), rows_(rows), cols_(cols) {
  if (rows < 2 || cols < 2) throw InvalidArgument("independence model: need at least a 2 x 2 table");
}

std::string IndependenceModel::id() const {
  return "independence:" + std::to_string(rows_) + "x" + std::to_string(cols_);
}

std::size_t IndependenceModel::cell(double x) const {
  const double r = std::round(x);
  if (r != x || r < 0.0 || r >= static_cast<double>(rows_ * cols_))
    throw DomainError("independence model: " + std::to_string(x) + " is not a cell code");
  return static_cast<std::size_t>(r);
}

std::vector<double> IndependenceModel::row_probs(const Theta& t) const {
  require_size(t, dimension(), "independence model");
  std::vector<double> p(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(rows_ - 1));
  double rest = 1.0;
  for (double v : p) rest -= v;
  p.push_back(rest);
  for (double v : p)
    if (!(v > 0.0)) throw DomainError("independence model: row probabilities must be positive");
  return p;
}

std::vector<double> IndependenceModel::col_probs(const Theta& t) const {
  require_size(t, dimension(), "independence model");
  std::vector<double> q(t.begin() + static_cast<std::ptrdiff_t>(rows_ - 1), t.end());
  double rest = 1.0;
  for (double v : q) rest -= v;
  q.push_back(rest);
  for (double v : q)
    if (!(v > 0.0)) throw DomainError("independence model: column probabilities must be positive");
  return q;
}

double IndependenceModel::density(double x, const Theta& t) const {
  const auto k = cell(x);
  return row_probs(t)[k / cols_] * col_probs(t)[k % cols_];
}

Eigen::VectorXd IndependenceModel::score(double x, const Theta& t) const {
  const auto k = cell(x);
  const auto p = row_probs(t);
  const auto q = col_probs(t);
  const std::size_t i = k / cols_;
  const std::size_t j = k % cols_;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t a = 0; a + 1 < rows_; ++a)
    u(static_cast<Eigen::Index>(a)) = (i == a ? 1.0 / p[a] : 0.0) - (i == rows_ - 1 ? 1.0 / p[rows_ - 1] : 0.0);
  for (std::size_t b = 0; b + 1 < cols_; ++b)
    u(static_cast<Eigen::Index>(rows_ - 1 + b)) =
        (j == b ? 1.0 / q[b] : 0.0) - (j == cols_ - 1 ? 1.0 / q[cols_ - 1] : 0.0);
  return u;
}

Eigen::MatrixXd IndependenceModel::information(const Theta& t) const {
  const auto g = baseline(t);
  const auto& d = *g.as<BaselineMeasure::Discrete>();
  const auto p = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t k = 0; k < d.support.size(); ++k) {
    const auto u = score(d.support[k], t);
    j.noalias() += d.probs[k] * u * u.transpose();
  }
  return j;
}

Theta IndependenceModel::fit_mle(std::span<const double> s) const {
  if (s.empty()) throw FitError("independence MLE: empty sample");
  std::vector<double> rc(rows_, 0.0);
  std::vector<double> cc(cols_, 0.0);
  for (double x : s) {
    std::size_t k = 0;
    try {
      k = cell(x);
    } catch (const DomainError& e) {
      throw FitError(e.what());
    }
    rc[k / cols_] += 1.0;
    cc[k % cols_] += 1.0;
  }
  const double n = static_cast<double>(s.size());
  for (double v : rc)
    if (v == 0.0) throw FitError("independence MLE: empty row margin (singular fit)");
  for (double v : cc)
    if (v == 0.0) throw FitError("independence MLE: empty column margin (singular fit)");
  Theta t;
  for (std::size_t a = 0; a + 1 < rows_; ++a) t.push_back(rc[a] / n);
  for (std::size_t b = 0; b + 1 < cols_; ++b) t.push_back(cc[b] / n);
  return t;
}

BaselineMeasure IndependenceModel::baseline(const Theta& t) const {
  const auto p = row_probs(t);
  const auto q = col_probs(t);
  std::vector<double> support;
  std::vector<double> probs;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      support.push_back(code(i, j));
      probs.push_back(p[i] * q[j]);
    }
  // Products of margins can miss unit mass by a few ulps.
  double total = 0.0;
  for (double v : probs) total += v;
  for (double& v : probs) v /= total;
  return BaselineMeasure::discrete(std::move(support), std::move(probs));
}

double IndependenceModel::pearson_x2(std::span<const double> s) const {
  const auto theta = fit_mle(s);
  std::vector<double> counts(rows_ * cols_, 0.0);
  for (double x : s) counts[cell(x)] += 1.0;
  const auto p = row_probs(theta);
  const auto q = col_probs(theta);
  const double n = static_cast<double>(s.size());
  std::vector<double> terms;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const double e = n * p[i] * q[j];
      const double d = counts[i * cols_ + j] - e;
      terms.push_back(d * d / e);
    }
  return pairwise_sum(terms);
}

double score_residual(const ParametricModel& m, std::span<const double> sample, const Theta& theta) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dimension()));
  for (double x : sample) total += m.score(x, theta);
  return total.size() == 0 ? 0.0 : total.cwiseAbs().maxCoeff();
}

}  // namespace quadfit
