#include "quadfit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "overloaded.hpp"
#include "quadfit/error.hpp"

namespace quadfit {

using detail::Overloaded;

BaselineMeasure BaselineMeasure::normal(double mean, double variance) {
  if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance))
    throw InvalidArgument("normal measure: variance must be positive and finite");
  return BaselineMeasure(Normal{mean, variance});
}

BaselineMeasure BaselineMeasure::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw InvalidArgument("exponential measure: rate must be positive");
  return BaselineMeasure(Exponential{rate});
}

BaselineMeasure BaselineMeasure::discrete(std::vector<double> support, std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size())
    throw InvalidArgument("discrete measure: support and probabilities must be nonempty and aligned");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return support[a] < support[b]; });
  Discrete d;
  d.support.reserve(support.size());
  d.probs.reserve(support.size());
  double total = 0.0;
  for (auto i : order) {
    if (!std::isfinite(support[i])) throw InvalidArgument("discrete measure: non-finite support point");
    if (!(probs[i] >= 0.0)) throw InvalidArgument("discrete measure: negative probability");
    if (!d.support.empty() && d.support.back() == support[i])
      throw InvalidArgument("discrete measure: repeated support point");
    d.support.push_back(support[i]);
    d.probs.push_back(probs[i]);
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("discrete measure: probabilities sum to " + std::to_string(total));
  return BaselineMeasure(std::move(d));
}

BaselineMeasure BaselineMeasure::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("uniform measure: need finite lo < hi");
  return BaselineMeasure(UniformInterval{lo, hi});
}

BaselineMeasure BaselineMeasure::circle() { return BaselineMeasure(UniformCircle{}); }

BaselineMeasure BaselineMeasure::empirical(std::vector<double> points) {
  if (points.empty()) throw InvalidArgument("empirical measure: sample is empty");
  for (double x : points)
    if (!std::isfinite(x)) throw InvalidArgument("empirical measure: non-finite point");
  return BaselineMeasure(Empirical{std::move(points)});
}

bool BaselineMeasure::is_discrete() const noexcept {
  return as<Discrete>() != nullptr || as<Empirical>() != nullptr;
}

bool BaselineMeasure::contains(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  return std::visit(Overloaded{
                        [](const Normal&) { return true; },
                        [x](const Exponential&) { return x >= 0.0; },
                        [x](const Discrete& d) {
                          return std::binary_search(d.support.begin(), d.support.end(), x);
                        },
                        [x](const UniformInterval& u) { return x >= u.lo && x <= u.hi; },
                        [x](const UniformCircle&) { return x >= 0.0 && x < kTwoPi; },
                        [x](const Empirical& e) {
                          return std::find(e.points.begin(), e.points.end(), x) != e.points.end();
                        },
                    },
                    *kind_);
}

double BaselineMeasure::lower() const noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const Normal&) { return -inf; },
                        [](const Exponential&) { return 0.0; },
                        [](const Discrete& d) { return d.support.front(); },
                        [](const UniformInterval& u) { return u.lo; },
                        [](const UniformCircle&) { return 0.0; },
                        [](const Empirical& e) { return *std::min_element(e.points.begin(), e.points.end()); },
                    },
                    *kind_);
}

double BaselineMeasure::upper() const noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const Normal&) { return inf; },
                        [](const Exponential&) { return inf; },
                        [](const Discrete& d) { return d.support.back(); },
                        [](const UniformInterval& u) { return u.hi; },
                        [](const UniformCircle&) { return kTwoPi; },
                        [](const Empirical& e) { return *std::max_element(e.points.begin(), e.points.end()); },
                    },
                    *kind_);
}

double BaselineMeasure::mass(double x) const noexcept {
  if (const auto* d = as<Discrete>()) {
    auto it = std::lower_bound(d->support.begin(), d->support.end(), x);
    if (it == d->support.end() || *it != x) return 0.0;
    return d->probs[static_cast<std::size_t>(it - d->support.begin())];
  }
  if (const auto* e = as<Empirical>()) {
    const auto hits = std::count(e->points.begin(), e->points.end(), x);
    return static_cast<double>(hits) / static_cast<double>(e->points.size());
  }
  return 0.0;
}

QuadratureRule BaselineMeasure::atoms() const {
  if (const auto* d = as<Discrete>()) return {d->support, d->probs};
  if (const auto* e = as<Empirical>()) {
    const double w = 1.0 / static_cast<double>(e->points.size());
    return {e->points, std::vector<double>(e->points.size(), w)};
  }
  throw InvalidArgument("atoms: measure " + describe() + " has no finite support");
}

double BaselineMeasure::integrate(const ScalarFn& f, std::span<const double> breakpoints) const {
  return std::visit(
      Overloaded{
          [&](const Normal& n) { return normal_expectation(f, n.mean, n.variance, 64); },
          [&](const Exponential& e) {
            const double rate = e.rate;
            auto g = [&](double x) { return f(x) * rate * std::exp(-rate * x); };
            return quadfit::integrate(g, 0.0, std::numeric_limits<double>::infinity(), breakpoints);
          },
          [&](const Discrete&) { return atoms().apply(f); },
          [&](const UniformInterval& u) {
            const double width = u.hi - u.lo;
            auto g = [&](double x) { return f(x) / width; };
            return quadfit::integrate(g, u.lo, u.hi, breakpoints);
          },
          [&](const UniformCircle&) { return periodic_rule(0.0, kTwoPi, 256).apply(f); },
          [&](const Empirical&) { return atoms().apply(f); },
      },
      *kind_);
}

std::optional<QuadratureRule> BaselineMeasure::discretization(std::size_t nodes) const {
  return std::visit(Overloaded{
                        [&](const Normal& n) -> std::optional<QuadratureRule> {
                          return normal_rule(n.mean, n.variance, nodes);
                        },
                        [&](const Exponential& e) -> std::optional<QuadratureRule> {
                          return exponential_rule(e.rate, nodes);
                        },
                        [&](const Discrete&) -> std::optional<QuadratureRule> { return atoms(); },
                        [&](const UniformInterval& u) -> std::optional<QuadratureRule> {
                          return midpoint_rule(u.lo, u.hi, nodes);
                        },
                        [&](const UniformCircle&) -> std::optional<QuadratureRule> {
                          return periodic_rule(0.0, kTwoPi, nodes);
                        },
                        [&](const Empirical&) -> std::optional<QuadratureRule> { return atoms(); },
                    },
                    *kind_);
}

std::vector<double> BaselineMeasure::sample(Rng& rng, std::size_t count) const {
  std::vector<double> out(count);
  std::visit(Overloaded{
                 [&](const Normal& n) {
                   std::normal_distribution<double> dist(n.mean, std::sqrt(n.variance));
                   for (auto& x : out) x = dist(rng);
                 },
                 [&](const Exponential& e) {
                   std::exponential_distribution<double> dist(e.rate);
                   for (auto& x : out) x = dist(rng);
                 },
                 [&](const Discrete& d) {
                   std::discrete_distribution<std::size_t> dist(d.probs.begin(), d.probs.end());
                   for (auto& x : out) x = d.support[dist(rng)];
                 },
                 [&](const UniformInterval& u) {
                   std::uniform_real_distribution<double> dist(u.lo, u.hi);
                   for (auto& x : out) x = dist(rng);
                 },
                 [&](const UniformCircle&) {
                   std::uniform_real_distribution<double> dist(0.0, kTwoPi);
                   for (auto& x : out) x = dist(rng);
                 },
                 [&](const Empirical& e) {
                   std::uniform_int_distribution<std::size_t> dist(0, e.points.size() - 1);
                   for (auto& x : out) x = e.points[dist(rng)];
                 },
             },
             *kind_);
  return out;
}

std::string BaselineMeasure::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Normal& n) { os << "normal(mu=" << n.mean << ",sigma2=" << n.variance << ")"; },
                 [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
                 [&](const Discrete& d) { os << "pmf(" << d.support.size() << " atoms)"; },
                 [&](const UniformInterval& u) {
                   if (u.lo == 0.0 && u.hi == 1.0)
                     os << "uniform01";
                   else
                     os << "uniform(lo=" << u.lo << ",hi=" << u.hi << ")";
                 },
                 [&](const UniformCircle&) { os << "circle"; },
                 [&](const Empirical& e) { os << "sample(" << e.points.size() << " points)"; },
             },
             *kind_);
  return os.str();
}

}  // namespace quadfit
