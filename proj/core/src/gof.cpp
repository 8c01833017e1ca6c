#include "quadfit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadfit/error.hpp"
#include "quadfit/parallel.hpp"
#include "quadfit/random.hpp"

namespace quadfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double scaled_statistic(const MatrixMeans& m, std::size_t n, Estimator e) {
  const double nd = static_cast<double>(n);
  if (e == Estimator::u_stat) {
    if (n < 2) throw InvalidArgument("U statistic needs at least two observations");
    return std::sqrt(nd * (nd - 1.0)) * m.u;
  }
  return nd * m.v;
}

void check_sample(std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("empty sample");
  for (double x : sample)
    if (!std::isfinite(x)) throw InvalidArgument("sample contains a non-finite value");
}

// Fills trace, dof and the Satterthwaite / normal reference p-value.
void fill_dof(GofTestResult& r, double trace, double trace_sq) {
  if (!(trace_sq > 0.0) || !std::isfinite(trace_sq))
    throw RouteRefused("the centered kernel has zero (or non-finite) squared trace under the null; "
                       "no limiting distribution is available");
  r.trace = trace;
  r.trace_sq = trace_sq;
  if (std::isfinite(trace)) {
    r.scale = pearson_scale(trace, trace_sq);
    r.dof = sdof(trace, trace_sq);
  } else {
    r.scale = kNaN;
    r.dof = kNaN;
  }
}

void fill_satterthwaite(GofTestResult& r) {
  if (r.estimator == Estimator::v_stat) {
    r.satterthwaite = satterthwaite_tail(r.statistic, r.scale, r.dof);
  } else if (std::isfinite(r.trace)) {
    // sqrt(n(n-1)) U_n + trace approximates chi*(lambda).
    r.satterthwaite = satterthwaite_tail(r.statistic + r.trace, r.scale, r.dof);
  } else {
    r.satterthwaite = normal_tail(r.statistic, 0.0, 2.0 * r.trace_sq);
    r.normal_reference = true;
  }
}

BootstrapResult summarize(double observed, const std::vector<double>& stats, const std::vector<char>& ok) {
  BootstrapResult b;
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!ok[i]) {
      ++b.discarded;
      continue;
    }
    ++b.replicates;
    if (stats[i] >= observed) ++exceed;
  }
  if (static_cast<double>(b.discarded) > 0.05 * static_cast<double>(stats.size()))
    throw Error("bootstrap aborted: " + std::to_string(b.discarded) + " of " + std::to_string(stats.size()) +
                " replicates failed");
  b.p = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(b.replicates) + 1.0);
  b.se = std::sqrt(b.p * (1.0 - b.p) / static_cast<double>(b.replicates));
  return b;
}

template <class Replicate>
BootstrapResult run_bootstrap(double observed, std::size_t replicates, std::size_t workers, Replicate&& rep) {
  if (replicates < 50) throw InvalidArgument("bootstrap needs at least 50 replicates");
  std::vector<double> stats(replicates, 0.0);
  std::vector<char> ok(replicates, 0);
  parallel_for(
      replicates,
      [&](std::size_t b) {
        try {
          stats[b] = rep(b);
          ok[b] = std::isfinite(stats[b]) ? 1 : 0;
        } catch (const Error&) {
          ok[b] = 0;
        }
      },
      workers);
  return summarize(observed, stats, ok);
}

double simple_statistic(const CenteredKernel& k, std::span<const double> sample, Estimator e) {
  return scaled_statistic(matrix_means(k.matrix(sample)), sample.size(), e);
}

}  // namespace

SpectralDecomposition null_spectrum(const CenteredKernel& k, const ScoreSpectrumOptions& options,
                                    std::size_t max_terms) {
  const auto& base = k.base();
  const auto& g = k.center();
  if (base.family() == KernelFamily::poisson) {
    const auto [lo, hi] = base.period();
    const auto* interval = g.as<BaselineMeasure::UniformInterval>();
    const bool circle = g.as<BaselineMeasure::UniformCircle>() != nullptr && lo == 0.0 && hi == kTwoPi;
    if (circle || (interval != nullptr && interval->lo == lo && interval->hi == hi))
      return poisson_spectrum(base.rho(), geometric_terms(base.rho(), max_terms / 2), true, lo, hi);
  }
  if (base.family() == KernelFamily::cvm) {
    const auto* interval = g.as<BaselineMeasure::UniformInterval>();
    if (interval != nullptr && interval->lo == 0.0 && interval->hi == 1.0) return cvm_spectrum(max_terms);
  }
  const double total = trace_analytic(k);
  const double cap_total = std::isfinite(total) ? total : kNaN;
  if (const auto rule = g.discretization(options.quadrature_nodes)) {
    auto s = weighted_eigs(k.matrix(rule->nodes), rule->weights);
    s.method = g.is_discrete() ? "discrete" : "quadrature";
    s.baseline = g;
    return truncate_spectrum(std::move(s), 1e-12, max_terms, g.is_discrete() ? kNaN : cap_total);
  }
  Rng rng = make_rng(options.seed, streams::nystrom);
  const auto pts = g.sample(rng, options.nystrom_points);
  EmpiricalKernelMatrix em;
  em.entries = k.matrix(pts);
  em.centered = true;
  auto s = empirical_eigs(em);
  s.method = "nystrom";
  s.baseline = g;
  return truncate_spectrum(std::move(s), 1e-12, max_terms);
}

SimpleNullTest::SimpleNullTest(const Kernel& k, BaselineMeasure g, GofOptions options)
    : centered_(center_kernel(k, g)), options_(std::move(options)) {
  traces_ = null_traces(centered_);
  if (!(traces_.trace_sq > 0.0) || !std::isfinite(traces_.trace_sq))
    throw RouteRefused("the centered kernel has zero (or non-finite) squared trace under " + g.describe());
  if (!std::isfinite(traces_.trace) && options_.estimator == Estimator::v_stat)
    throw RouteRefused("the trace of the centered kernel diverges under " + g.describe() +
                       "; V-statistic p-values are unavailable, use the U estimator");
  auto sopt = options_.spectrum;
  sopt.seed = options_.seed;
  spectrum_ = null_spectrum(centered_, sopt, options_.max_terms);
  if (options_.methods.spectral) {
    const bool centered_form = options_.estimator == Estimator::u_stat;
    reference_.emplace(ChiStarDistribution::from_spectrum(spectrum_, centered_form), options_.draws, options_.seed,
                       options_.workers);
  }
}

double SimpleNullTest::statistic(std::span<const double> sample) const {
  return simple_statistic(centered_, sample, options_.estimator);
}

GofTestResult SimpleNullTest::operator()(std::span<const double> sample) const {
  check_sample(sample);
  GofTestResult r;
  r.estimator = options_.estimator;
  r.n = sample.size();
  const auto means = matrix_means(centered_.matrix(sample));
  r.v_stat = means.v;
  r.u_stat = means.u;
  r.statistic = scaled_statistic(means, r.n, r.estimator);
  fill_dof(r, traces_.trace, traces_.trace_sq);
  r.trace_method = to_string(traces_.method);
  r.heuristic = dof_heuristic_range(r.n, 1);
  if (reference_) r.spectral = (*reference_)(r.statistic);
  if (options_.methods.satterthwaite) fill_satterthwaite(r);
  if (options_.methods.bootstrap)
    r.bootstrap = bootstrap_pvalue(sample, centered_.center(), centered_.base(), options_.bootstrap_replicates,
                                   options_.seed, r.estimator, options_.workers);
  r.spectrum = spectrum_;
  r.null_description = centered_.center().describe();
  r.kernel = centered_.base().name();
  return r;
}

GofTestResult simple_null_test(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k,
                               const GofOptions& options) {
  return SimpleNullTest(k, g, options)(sample);
}

double composite_statistic(std::span<const double> sample, const ScoreCenteredKernel& k, Estimator e) {
  return scaled_statistic(matrix_means(k.matrix(sample)), sample.size(), e);
}

GofTestResult composite_null_test(std::span<const double> sample, const ModelPtr& model, const Kernel& k,
                                  const GofOptions& options) {
  check_sample(sample);
  if (!model) throw InvalidArgument("composite_null_test: null model");
  GofTestResult r;
  r.estimator = options.estimator;
  r.n = sample.size();
  r.theta = model->fit_mle(sample);
  const ScoreCenteredKernel sck(k, model, r.theta);
  const auto means = matrix_means(sck.matrix(sample));
  r.v_stat = means.v;
  r.u_stat = means.u;
  r.statistic = scaled_statistic(means, r.n, r.estimator);

  auto sopt = options.spectrum;
  sopt.seed = options.seed;
  sopt.max_terms = options.max_terms;
  r.spectrum = score_centered_spectrum(sck, sopt);
  fill_dof(r, r.spectrum.sum() + r.spectrum.tail_bound, r.spectrum.sum_sq());
  r.trace_method = "spectrum:" + r.spectrum.method;
  r.heuristic = dof_heuristic_range(r.n, 1);
  if (options.methods.spectral) {
    const ChiStarTail tail(ChiStarDistribution::from_spectrum(r.spectrum, r.estimator == Estimator::u_stat),
                           options.draws, options.seed, options.workers);
    r.spectral = tail(r.statistic);
  }
  if (options.methods.satterthwaite) fill_satterthwaite(r);
  if (options.methods.bootstrap)
    r.bootstrap = bootstrap_pvalue(sample, model, k, options.bootstrap_replicates, options.seed, r.estimator,
                                   options.workers);
  r.null_description = sck.baseline().describe();
  r.kernel = sck.base().name();
  return r;
}

BootstrapResult bootstrap_pvalue(std::span<const double> sample, const BaselineMeasure& g, const Kernel& k,
                                 std::size_t replicates, std::uint64_t seed, Estimator e, std::size_t workers) {
  check_sample(sample);
  const auto centered = center_kernel(k, g);
  const double observed = simple_statistic(centered, sample, e);
  const std::size_t n = sample.size();
  return run_bootstrap(observed, replicates, workers, [&](std::size_t b) {
    Rng rng = make_rng(seed, streams::bootstrap, b);
    const auto star = g.sample(rng, n);
    return simple_statistic(centered, star, e);
  });
}

BootstrapResult bootstrap_pvalue(std::span<const double> sample, const ModelPtr& model, const Kernel& k,
                                 std::size_t replicates, std::uint64_t seed, Estimator e, std::size_t workers) {
  check_sample(sample);
  if (!model) throw InvalidArgument("bootstrap_pvalue: null model");
  const auto theta = model->fit_mle(sample);
  const double observed = composite_statistic(sample, ScoreCenteredKernel(k, model, theta), e);
  const std::size_t n = sample.size();
  return run_bootstrap(observed, replicates, workers, [&](std::size_t b) {
    Rng rng = make_rng(seed, streams::bootstrap, b);
    const auto star = model->sample(rng, n, theta);
    const auto theta_star = model->fit_mle(star);
    return composite_statistic(star, ScoreCenteredKernel(k, model, theta_star), e);
  });
}

}  // namespace quadfit
