#include "quadfit/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <tuple>
#include <map>
#include <mutex>
#include <numbers>

#include "quadfit/error.hpp"

namespace quadfit {

double QuadratureRule::apply(const ScalarFn& f) const {
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
  return pairwise_sum(terms);
}

namespace {

// Golub–Welsch for the starting nodes, then Newton on the orthonormal
// recurrence; the weights come from the derivative at the polished node.
QuadratureRule compute_gauss_hermite(std::size_t n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("gauss_hermite: eigensolver failed");

  const double pim4 = std::pow(std::numbers::pi, -0.25);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    double pp = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * static_cast<double>(n)) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_hermite(std::size_t nodes) {
  if (nodes == 0) throw InvalidArgument("gauss_hermite: need at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(nodes);
  if (it == cache.end()) it = cache.emplace(nodes, compute_gauss_hermite(nodes)).first;
  return it->second;
}

QuadratureRule normal_rule(double mean, double variance, std::size_t nodes) {
  if (!(variance > 0.0)) throw InvalidArgument("normal_rule: variance must be positive");
  const auto& base = gauss_hermite(nodes);
  QuadratureRule rule;
  rule.nodes.resize(nodes);
  rule.weights.resize(nodes);
  const double scale = std::sqrt(2.0 * variance);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < nodes; ++i) {
    rule.nodes[i] = mean + scale * base.nodes[i];
    rule.weights[i] = base.weights[i] * norm;
  }
  return rule;
}

QuadratureRule exponential_rule(double rate, std::size_t nodes) {
  if (!(rate > 0.0) || nodes == 0) throw InvalidArgument("exponential_rule: bad rate or node count");
  const auto n = static_cast<Eigen::Index>(nodes);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    jacobi(k, k) = 2.0 * static_cast<double>(k) + 1.0;
    if (k + 1 < n) jacobi(k, k + 1) = jacobi(k + 1, k) = static_cast<double>(k + 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("exponential_rule: eigensolver failed");
  // Laguerre L_m(x) and L_{m-1}(x) by the three-term recurrence, returned
  // with a common scale factor exp(log_scale) divided out.
  struct Pair {
    double cur, prev, log_scale;
  };
  const auto laguerre = [](std::size_t m, double x) {
    Pair p{1.0, 0.0, 0.0};
    for (std::size_t j = 1; j <= m; ++j) {
      const double jd = static_cast<double>(j);
      const double next = ((2.0 * jd - 1.0 - x) * p.cur - (jd - 1.0) * p.prev) / jd;
      p.prev = p.cur;
      p.cur = next;
      if (std::fabs(p.cur) > 1e150) {
        p.cur *= 1e-150;
        p.prev *= 1e-150;
        p.log_scale += 150.0 * std::numbers::ln10;
      }
    }
    return p;
  };
  const double nd = static_cast<double>(nodes);
  QuadratureRule rule;
  rule.nodes.resize(nodes);
  rule.weights.resize(nodes);
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(i);
    for (int iter = 0; iter < 8; ++iter) {
      const auto p = laguerre(nodes, x);
      const double step = x * p.cur / (nd * (p.cur - p.prev));  // L_n / L_n'
      x -= step;
      if (std::fabs(step) < 1e-15 * x) break;
    }
    // w = x / ((n+1) L_{n+1}(x))^2
    const auto p = laguerre(nodes + 1, x);
    const double log_w = std::log(x) - 2.0 * (std::log(nd + 1.0) + std::log(std::fabs(p.cur)) + p.log_scale);
    rule.nodes[static_cast<std::size_t>(i)] = x / rate;
    rule.weights[static_cast<std::size_t>(i)] = std::exp(log_w);
  }
  // Far-tail weights underflow to zero and carry no mass.
  QuadratureRule kept;
  for (std::size_t i = 0; i < nodes; ++i)
    if (rule.weights[i] > 0.0) {
      kept.nodes.push_back(rule.nodes[i]);
      kept.weights.push_back(rule.weights[i]);
    }
  const double total = pairwise_sum(kept.weights);
  for (auto& w : kept.weights) w /= total;
  return kept;
}

double normal_expectation(const ScalarFn& f, double mean, double variance, std::size_t nodes) {
  return normal_rule(mean, variance, nodes).apply(f);
}

QuadratureRule periodic_rule(double lo, double hi, std::size_t nodes) {
  if (!(hi > lo) || nodes == 0) throw InvalidArgument("periodic_rule: bad range");
  QuadratureRule rule;
  rule.nodes.resize(nodes);
  rule.weights.assign(nodes, 1.0 / static_cast<double>(nodes));
  const double step = (hi - lo) / static_cast<double>(nodes);
  for (std::size_t i = 0; i < nodes; ++i) rule.nodes[i] = lo + step * static_cast<double>(i);
  return rule;
}

QuadratureRule midpoint_rule(double lo, double hi, std::size_t nodes) {
  if (!(hi > lo) || nodes == 0) throw InvalidArgument("midpoint_rule: bad range");
  QuadratureRule rule;
  rule.nodes.resize(nodes);
  rule.weights.assign(nodes, 1.0 / static_cast<double>(nodes));
  const double step = (hi - lo) / static_cast<double>(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    rule.nodes[i] = lo + step * (static_cast<double>(i) + 0.5);
  return rule;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Panel {
  std::size_t piece;
  double a, b;
  double value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Boost reports the error of the rule mapped onto [-1, 1]; rescale it to [a, b].
Panel evaluate(const ScalarFn& g, std::size_t piece, double a, double b) {
  Panel p{piece, a, b, 0.0, 0.0, 0.0};
  p.value = GK::integrate(g, a, b, 0, 0.0, &p.error, &p.l1);
  p.error *= 0.5 * (b - a);
  return p;
}

}  // namespace

double integrate(const ScalarFn& f, double lo, double hi, std::span<const double> breakpoints,
                 IntegrationOptions options) {
  if (!(hi > lo)) {
    if (hi == lo) return 0.0;
    throw InvalidArgument("integrate: upper limit below lower limit");
  }
  std::vector<double> cuts{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi && std::isfinite(b)) cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(hi);

  // Each piece becomes an integrand on a finite t-range; infinite pieces are
  // compactified by x = c +- t / (1 - t).
  std::vector<ScalarFn> pieces;
  std::vector<double> spans;
  std::vector<Panel> heap;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (std::isfinite(a) && std::isfinite(b)) {
      pieces.push_back(f);
    } else if (std::isfinite(a)) {
      pieces.push_back([&f, a](double t) {
        const double u = 1.0 - t;
        return f(a + t / u) / (u * u);
      });
    } else if (std::isfinite(b)) {
      pieces.push_back([&f, b](double t) {
        const double u = 1.0 - t;
        return f(b - t / u) / (u * u);
      });
    } else {
      pieces.push_back([&f](double t) {
        const double u = 1.0 - t * t;
        return f(t / u) * (1.0 + t * t) / (u * u);
      });
    }
    const bool finite = std::isfinite(a) && std::isfinite(b);
    const double ta = finite ? a : (std::isfinite(a) || std::isfinite(b) ? 0.0 : -1.0);
    const double tb = finite ? b : 1.0;
    spans.push_back(tb - ta);
    try {
      heap.push_back(evaluate(pieces.back(), pieces.size() - 1, ta, tb));
    } catch (const std::exception& e) {
      throw IntegrationError(std::string("integrate: ") + e.what());
    }
  }

  // Panels narrower than this fraction of their piece are never split again;
  // an integrable endpoint singularity has converged by then.
  constexpr double kMinRelativeWidth = 1e-24;
  std::vector<Panel> frozen;
  auto totals = [&] {
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (const auto* set : {&heap, &frozen})
      for (const auto& p : *set) {
        value += p.value;
        error += p.error;
        l1 += p.l1;
      }
    return std::tuple{value, error, l1};
  };
  std::make_heap(heap.begin(), heap.end());
  auto [value, error, l1] = totals();
  while (std::isfinite(value) && error > std::max(1e-2 * options.abs_tol, 1e-13 * l1) &&
         !heap.empty() && heap.size() + frozen.size() < options.max_intervals) {
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a < kMinRelativeWidth * spans[worst.piece] || !(mid > worst.a && mid < worst.b)) {
      frozen.push_back(worst);
      continue;
    }
    Panel left, right;
    try {
      left = evaluate(pieces[worst.piece], worst.piece, worst.a, mid);
      right = evaluate(pieces[worst.piece], worst.piece, mid, worst.b);
    } catch (const std::exception& e) {
      throw IntegrationError(std::string("integrate: ") + e.what());
    }
    for (const auto& p : {left, right}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end());
    }
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    if (heap.size() % 64 == 0) std::tie(value, error, l1) = totals();  // limit drift of the running sums
  }
  if (!std::isfinite(value)) throw IntegrationError("integrate: non-finite integral");
  if (error > options.abs_tol && error > 1e-11 * l1) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "integrate: error estimate %.3g exceeds tolerance (l1 norm %.3g)", error, l1);
    throw IntegrationError(msg);
  }
  return value;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace quadfit
