#include "quadfit/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "quadfit/error.hpp"
#include "quadfit/quadrature.hpp"

namespace quadfit {

const char* to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::exact:
      return "exact";
    case Estimator::v_stat:
      return "v";
    case Estimator::u_stat:
      return "u";
  }
  return "unknown";
}

namespace {

std::map<double, double> signed_masses(const BaselineMeasure& f, const BaselineMeasure& g) {
  if (!f.is_discrete() || !g.is_discrete())
    throw InvalidArgument(
        "quadratic_distance: exact route needs finite-support measures; use v_stat or "
        "normal_model_distance for continuous nulls");
  std::map<double, double> sigma;
  const auto fa = f.atoms();
  const auto ga = g.atoms();
  for (std::size_t i = 0; i < fa.size(); ++i) sigma[fa.nodes[i]] += fa.weights[i];
  for (std::size_t i = 0; i < ga.size(); ++i) sigma[ga.nodes[i]] -= ga.weights[i];
  return sigma;
}

}  // namespace

double quadratic_distance(const BaselineMeasure& f, const BaselineMeasure& g, const Kernel& k) {
  const Kernel kernel = k.bound() ? k : k.bind_reference(g);
  const auto sigma = signed_masses(f, g);
  std::vector<double> pts;
  std::vector<double> w;
  for (const auto& [x, m] : sigma) {
    pts.push_back(x);
    w.push_back(m);
  }
  std::vector<double> terms;
  terms.reserve(pts.size() * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (w[i] == 0.0 || w[j] == 0.0) {
        (void)kernel(pts[i], pts[j]);  // still enforce the domain
        continue;
      }
      terms.push_back(w[i] * w[j] * kernel(pts[i], pts[j]));
    }
  return pairwise_sum(terms);
}

MatrixMeans matrix_means(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n == 0 || m.cols() != n) throw InvalidArgument("matrix_means: need a nonempty square matrix");
  const double nd = static_cast<double>(n);
  const double total = pairwise_sum(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = m(i, i);
  const double diag_sum = pairwise_sum(diag);
  MatrixMeans out;
  out.v = total / (nd * nd);
  out.diagonal = diag_sum / nd;
  out.u = n < 2 ? std::numeric_limits<double>::quiet_NaN() : (total - diag_sum) / (nd * (nd - 1.0));
  return out;
}

DistanceEstimate v_stat(std::span<const double> sample, const CenteredKernel& k) {
  if (sample.empty()) throw InvalidArgument("v_stat: empty sample");
  DistanceEstimate d;
  d.value = matrix_means(k.matrix(sample)).v;
  d.estimator = Estimator::v_stat;
  d.n = sample.size();
  d.kernel = k.base().name();
  d.null_measure = k.center().describe();
  return d;
}

DistanceEstimate v_stat(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k) {
  return v_stat(sample, center_kernel(k, g));
}

DistanceEstimate u_stat(std::span<const double> sample, const CenteredKernel& k) {
  if (sample.size() < 2) throw InvalidArgument("u_stat: need at least two observations");
  DistanceEstimate d;
  d.value = matrix_means(k.matrix(sample)).u;
  d.estimator = Estimator::u_stat;
  d.n = sample.size();
  d.kernel = k.base().name();
  d.null_measure = k.center().describe();
  return d;
}

DistanceEstimate u_stat(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k) {
  return u_stat(sample, center_kernel(k, g));
}

double normal_model_distance(std::span<const double> sample, double mu, double sigma2, double h2) {
  if (!(h2 > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("normal_model_distance: variances must be positive");
  if (sample.empty()) throw InvalidArgument("normal_model_distance: empty sample");
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  std::vector<double> pair_terms;
  pair_terms.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    pair_terms.push_back(normal_density(0.0, h2));
    for (std::size_t j = i + 1; j < n; ++j) pair_terms.push_back(2.0 * normal_density(sample[i] - sample[j], h2));
  }
  std::vector<double> cross(n);
  for (std::size_t i = 0; i < n; ++i) cross[i] = normal_density(sample[i] - mu, h2 + sigma2);
  return pairwise_sum(pair_terms) / (nd * nd) - 2.0 * pairwise_sum(cross) / nd +
         normal_density(0.0, h2 + 2.0 * sigma2);
}

double smoothed_l2_distance(const BaselineMeasure& f, const BaselineMeasure& g, const Kernel& k) {
  const Kernel root = sqrt_kernel(k);
  const double half = root.bandwidth2();
  if (!f.is_discrete() || !g.is_discrete())
    throw InvalidArgument("smoothed_l2_distance: finite-support measures required");
  const auto fa = f.atoms();
  const auto ga = g.atoms();
  auto smooth = [&](const QuadratureRule& a, double z) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.weights[i] * normal_density(z - a.nodes[i], half);
    return s;
  };
  std::vector<double> cuts(fa.nodes);
  cuts.insert(cuts.end(), ga.nodes.begin(), ga.nodes.end());
  const double lo = *std::min_element(cuts.begin(), cuts.end()) - 40.0 * std::sqrt(half);
  const double hi = *std::max_element(cuts.begin(), cuts.end()) + 40.0 * std::sqrt(half);
  IntegrationOptions opts;
  opts.abs_tol = 1e-12;
  return integrate(
      [&](double z) {
        const double d = smooth(fa, z) - smooth(ga, z);
        return d * d;
      },
      lo, hi, cuts, opts);
}

}  // namespace quadfit
