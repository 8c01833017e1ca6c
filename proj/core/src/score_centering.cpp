#include "quadfit/score_centering.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "quadfit/error.hpp"
#include "quadfit/parallel.hpp"
#include "quadfit/quadrature.hpp"
#include "quadfit/random.hpp"

namespace quadfit {

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& j, const char* what) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(j);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError(std::string(what) + " is not positive definite");
  const auto d = ldlt.vectorD();
  if (d.size() > 0 && !(d.minCoeff() > 1e-13 * d.cwiseAbs().maxCoeff()))
    throw NumericalError(std::string(what) + " is singular");
  return ldlt.solve(Eigen::MatrixXd::Identity(j.rows(), j.cols()));
}

// Integral of f_i(y) dG(y) for a vector-valued f, one component at a time.
Eigen::VectorXd integrate_vector(const BaselineMeasure& g, std::size_t dim, std::span<const double> breaks,
                                 const std::function<Eigen::VectorXd(double)>& f) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
  if (const auto rule = g.discretization(64); rule && (g.is_discrete() || g.as<BaselineMeasure::Normal>())) {
    out.setZero();
    for (std::size_t i = 0; i < rule->size(); ++i) out += rule->weights[i] * f(rule->nodes[i]);
    return out;
  }
  for (std::size_t i = 0; i < dim; ++i)
    out(static_cast<Eigen::Index>(i)) = g.integrate([&](double y) { return f(y)(static_cast<Eigen::Index>(i)); }, breaks);
  return out;
}

}  // namespace

double extended_projection(double x, double y, const ParametricModel& model, const Theta& theta) {
  const auto jinv = checked_inverse(model.extended_information(theta), "extended information J*");
  return model.extended_score(x, theta).dot(jinv * model.extended_score(y, theta));
}

Eigen::MatrixXd discrete_score_center(const Eigen::MatrixXd& k, const Eigen::MatrixXd& scores,
                                      std::span<const double> weights) {
  const auto n = k.rows();
  if (k.cols() != n || scores.rows() != n || static_cast<Eigen::Index>(weights.size()) != n)
    throw InvalidArgument("discrete_score_center: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), n);
  const Eigen::MatrixXd ds = w.asDiagonal() * scores;                 // D S
  const Eigen::MatrixXd jinv = checked_inverse(scores.transpose() * ds, "discrete information");
  // I - D P = I - D S J^-1 S'
  const Eigen::MatrixXd right = Eigen::MatrixXd::Identity(n, n) - ds * jinv * scores.transpose();
  Eigen::MatrixXd out = right.transpose() * k * right;
  return 0.5 * (out + out.transpose());
}

ScoreCenteredKernel::ScoreCenteredKernel(const Kernel& k, ModelPtr model, Theta theta)
    : model_(std::move(model)),
      theta_(std::move(theta)),
      centered_(k, (model_ ? model_ : throw InvalidArgument("score centering: null model"))->baseline(theta_)) {
  const auto& g = baseline();
  const std::size_t p = model_->dimension();
  jstar_inv_ = checked_inverse(model_->extended_information(theta_), "extended information J*");
  if (p > 0) j_inv_ = checked_inverse(model_->information(theta_), "information J");

  if (g.is_discrete()) {
    discrete_ = true;
    const auto atoms = g.atoms();
    support_ = atoms.nodes;
    const auto s = static_cast<Eigen::Index>(support_.size());
    Eigen::MatrixXd kmat(s, s);
    Eigen::MatrixXd kcen(s, s);
    Eigen::MatrixXd ustar(s, static_cast<Eigen::Index>(p + 1));
    for (Eigen::Index i = 0; i < s; ++i) {
      ustar.row(i) = model_->extended_score(support_[static_cast<std::size_t>(i)], theta_).transpose();
      for (Eigen::Index j = 0; j < s; ++j) {
        kmat(i, j) = base()(support_[static_cast<std::size_t>(i)], support_[static_cast<std::size_t>(j)]);
        kcen(i, j) = centered_(support_[static_cast<std::size_t>(i)], support_[static_cast<std::size_t>(j)]);
      }
    }
    discrete_extended_ = discrete_score_center(kmat, ustar, atoms.weights);
    if (p == 0) {
      discrete_centered_ = kcen;
    } else {
      discrete_centered_ = discrete_score_center(kcen, ustar.rightCols(static_cast<Eigen::Index>(p)), atoms.weights);
    }
    return;
  }

  normal_normal_ = base().family() == KernelFamily::normal && model_->id() == "normal";
  const std::size_t dim = p + 1;
  if (normal_normal_) {
    // A*(y) is a normal density in y times a quadratic; against the normal
    // baseline the product is again normal, so a short Gauss–Hermite rule is exact.
    const double mu = theta_[0];
    const double s2 = theta_[1];
    const double h2 = base().bandwidth2();
    const double v = (h2 + s2) * s2 / (h2 + 2.0 * s2);
    const double scale = normal_density(0.0, h2 + 2.0 * s2);
    const auto rule = normal_rule(mu, v, 8);
    bstar_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double y = rule.nodes[i];
      const Eigen::VectorXd e = extended_kernel_scores(y) / normal_density(y - mu, h2 + s2);
      bstar_.noalias() += rule.weights[i] * scale * e * model_->extended_score(y, theta_).transpose();
    }
  } else {
    bstar_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      const auto col = integrate_vector(g, dim, {}, [&](double y) {
        return Eigen::VectorXd(extended_kernel_scores(y) * model_->extended_score(y, theta_)(static_cast<Eigen::Index>(j)));
      });
      bstar_.col(static_cast<Eigen::Index>(j)) = col;
    }
  }
  bstar_ = 0.5 * (bstar_ + bstar_.transpose()).eval();

  if (p > 0) {
    b_.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = integrate_vector(g, p, {}, [&](double y) {
        return Eigen::VectorXd(centered_kernel_scores(y) * model_->score(y, theta_)(static_cast<Eigen::Index>(j)));
      });
      b_.col(static_cast<Eigen::Index>(j)) = col;
    }
    b_ = 0.5 * (b_ + b_.transpose()).eval();
  }
}

Eigen::VectorXd ScoreCenteredKernel::extended_kernel_scores(double y) const {
  const std::size_t dim = model_->dimension() + 1;
  if (normal_normal_) {
    const double mu = theta_[0];
    const double s2 = theta_[1];
    const double h2 = base().bandwidth2();
    const double m = (y * s2 + mu * h2) / (h2 + s2);
    const double v = h2 * s2 / (h2 + s2);
    const double d = m - mu;
    Eigen::VectorXd e(3);
    e << 1.0, d / s2, (d * d + v - s2) / (2.0 * s2 * s2);
    return normal_density(y - mu, h2 + s2) * e;
  }
  const double breaks[] = {y};
  return integrate_vector(baseline(), dim, breaks,
                          [&](double z) { return Eigen::VectorXd(model_->extended_score(z, theta_) * base()(z, y)); });
}

Eigen::VectorXd ScoreCenteredKernel::centered_kernel_scores(double y) const {
  const std::size_t p = model_->dimension();
  const double breaks[] = {y};
  return integrate_vector(baseline(), p, breaks,
                          [&](double z) { return Eigen::VectorXd(model_->score(z, theta_) * centered_(z, y)); });
}

std::size_t ScoreCenteredKernel::support_index(double x) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x)
    throw DomainError("score-centered kernel: " + std::to_string(x) + " is outside the model support");
  return static_cast<std::size_t>(it - support_.begin());
}

double ScoreCenteredKernel::evaluate(double x, double y, ScoreRoute route) const {
  if (discrete_) {
    const auto i = static_cast<Eigen::Index>(support_index(x));
    const auto j = static_cast<Eigen::Index>(support_index(y));
    return route == ScoreRoute::extended ? discrete_extended_(i, j) : discrete_centered_(i, j);
  }
  if (route == ScoreRoute::extended) {
    const auto ux = model_->extended_score(x, theta_);
    const auto uy = model_->extended_score(y, theta_);
    const auto ax = extended_kernel_scores(x);
    const auto ay = extended_kernel_scores(y);
    const Eigen::VectorXd jx = jstar_inv_ * ux;
    const Eigen::VectorXd jy = jstar_inv_ * uy;
    return base()(x, y) - ax.dot(jy) - jx.dot(ay) + jx.dot(bstar_ * jy);
  }
  const double kc = centered_(x, y);
  if (model_->dimension() == 0) return kc;
  const auto ux = model_->score(x, theta_);
  const auto uy = model_->score(y, theta_);
  const auto ax = centered_kernel_scores(x);
  const auto ay = centered_kernel_scores(y);
  const Eigen::VectorXd jx = j_inv_ * ux;
  const Eigen::VectorXd jy = j_inv_ * uy;
  return kc - ax.dot(jy) - jx.dot(ay) + jx.dot(b_ * jy);
}

Eigen::MatrixXd ScoreCenteredKernel::matrix(std::span<const double> sample, ScoreRoute route) const {
  const auto n = static_cast<Eigen::Index>(sample.size());
  if (n == 0) throw InvalidArgument("score-centered matrix: empty sample");
  Eigen::MatrixXd out(n, n);
  if (discrete_) {
    std::vector<Eigen::Index> idx(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) idx[i] = static_cast<Eigen::Index>(support_index(sample[i]));
    const auto& src = route == ScoreRoute::extended ? discrete_extended_ : discrete_centered_;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out(i, j) = src(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return out;
  }
  const bool ext = route == ScoreRoute::extended;
  const std::size_t p = model_->dimension();
  if (!ext && p == 0) return centered_.matrix(sample);
  const auto dim = static_cast<Eigen::Index>(ext ? p + 1 : p);
  Eigen::MatrixXd u(n, dim);
  Eigen::MatrixXd a(n, dim);
  parallel_for(sample.size(), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    u.row(r) = (ext ? model_->extended_score(sample[i], theta_) : model_->score(sample[i], theta_)).transpose();
    a.row(r) = (ext ? extended_kernel_scores(sample[i]) : centered_kernel_scores(sample[i])).transpose();
  });
  const Eigen::MatrixXd base_m = ext ? build_empirical_matrix(base(), sample).entries : centered_.matrix(sample);
  const auto& jinv = ext ? jstar_inv_ : j_inv_;
  const auto& b = ext ? bstar_ : b_;
  const Eigen::MatrixXd uj = u * jinv;
  const Eigen::MatrixXd cross = a * uj.transpose();
  out = base_m - cross - cross.transpose() + uj * b * uj.transpose();
  return 0.5 * (out + out.transpose());
}

const char* to_string(SpectrumRoute r) noexcept {
  switch (r) {
    case SpectrumRoute::automatic:
      return "automatic";
    case SpectrumRoute::nystrom:
      return "nystrom";
    case SpectrumRoute::quadrature:
      return "quadrature";
    case SpectrumRoute::discrete:
      return "discrete";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd score_rows(const ScoreCenteredKernel& k, std::span<const double> pts) {
  const auto dim = static_cast<Eigen::Index>(k.model().dimension() + 1);
  Eigen::MatrixXd s(static_cast<Eigen::Index>(pts.size()), dim);
  for (std::size_t i = 0; i < pts.size(); ++i)
    s.row(static_cast<Eigen::Index>(i)) = k.model().extended_score(pts[i], k.theta()).transpose();
  return s;
}

SpectralDecomposition weighted_route(const ScoreCenteredKernel& k, const QuadratureRule& rule, const char* method,
                                     std::size_t max_terms) {
  const auto kmat = build_empirical_matrix(k.base(), rule.nodes).entries;
  const auto scen = discrete_score_center(kmat, score_rows(k, rule.nodes), rule.weights);
  auto s = weighted_eigs(scen, rule.weights);
  s.method = method;
  s.baseline = k.baseline();
  return truncate_spectrum(std::move(s), 1e-12, max_terms);
}

}  // namespace

NystromMatrices nystrom_matrices(const ScoreCenteredKernel& k, std::size_t m, std::uint64_t seed) {
  if (m < k.model().dimension() + 2) throw InvalidArgument("nystrom_matrices: too few points");
  NystromMatrices out;
  Rng rng = make_rng(seed, streams::nystrom);
  out.points = k.model().sample(rng, m, k.theta());
  out.scores = score_rows(k, out.points);
  const auto kmat = build_empirical_matrix(k.base(), out.points);
  const double md = static_cast<double>(m);
  out.centered = empirical_center_matrix(kmat).entries / md;
  const std::vector<double> w(m, 1.0 / md);
  out.score_centered = discrete_score_center(kmat.entries, out.scores, w) / md;
  return out;
}

SpectralDecomposition score_centered_spectrum(const ScoreCenteredKernel& k, const ScoreSpectrumOptions& options) {
  auto route = options.route;
  if (route == SpectrumRoute::automatic)
    route = k.baseline().is_discrete() ? SpectrumRoute::discrete : SpectrumRoute::nystrom;
  switch (route) {
    case SpectrumRoute::discrete: {
      if (!k.baseline().is_discrete()) throw InvalidArgument("discrete spectrum route needs a finite-support model");
      return weighted_route(k, k.baseline().atoms(), "discrete", options.max_terms);
    }
    case SpectrumRoute::quadrature: {
      const auto rule = k.baseline().discretization(options.quadrature_nodes);
      if (!rule) throw InvalidArgument("quadrature spectrum route unavailable for " + k.baseline().describe());
      return weighted_route(k, *rule, "quadrature", options.max_terms);
    }
    case SpectrumRoute::nystrom:
    case SpectrumRoute::automatic: {
      const auto nm = nystrom_matrices(k, options.nystrom_points, options.seed);
      EmpiricalKernelMatrix em;
      em.entries = nm.score_centered * static_cast<double>(options.nystrom_points);
      em.centered = true;
      auto s = empirical_eigs(em);
      s.method = "nystrom";
      s.baseline = k.baseline();
      return truncate_spectrum(std::move(s), 1e-12, options.max_terms);
    }
  }
  throw InvalidArgument("unknown spectrum route");
}

SuppressedDirections suppressed_directions(const Eigen::MatrixXd& m, const Eigen::MatrixXd& directions, double rel) {
  if (m.rows() != m.cols() || directions.rows() != m.rows())
    throw InvalidArgument("suppressed_directions: dimension mismatch");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(directions);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(directions.rows(), directions.cols());
  const Eigen::MatrixXd restricted = q.transpose() * m * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (restricted + restricted.transpose()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m, Eigen::EigenvaluesOnly);
  if (small.info() != Eigen::Success || full.info() != Eigen::Success)
    throw NumericalError("suppressed_directions: eigensolver failed");
  SuppressedDirections out;
  out.lambda_max = full.eigenvalues().maxCoeff();
  for (Eigen::Index i = 0; i < small.eigenvalues().size(); ++i) {
    const double v = small.eigenvalues()(i);
    out.restricted.push_back(v);
    if (std::fabs(v) < rel * out.lambda_max) ++out.count;
  }
  return out;
}

}  // namespace quadfit
