#include "quadfit/dof.hpp"

#include <cmath>
#include <numeric>

#include "quadfit/error.hpp"
#include "quadfit/quadrature.hpp"

namespace quadfit {

namespace {

void require_trace_sq(double trace_sq, const char* who) {
  if (!(trace_sq > 0.0) || !std::isfinite(trace_sq))
    throw InvalidArgument(std::string(who) + ": trace_sq must be positive and finite");
}

double power_sum(std::span<const double> v, int r) {
  std::vector<double> p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = std::pow(v[i], r);
  return pairwise_sum(p);
}

std::vector<double> gamma_weights(std::span<const double> lambda, const char* who) {
  if (lambda.empty()) throw InvalidArgument(std::string(who) + ": empty weights");
  for (double l : lambda)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument(std::string(who) + ": weights must be finite and >= 0");
  const double s2 = power_sum(lambda, 2);
  if (!(s2 > 0.0)) throw InvalidArgument(std::string(who) + ": all weights are zero");
  const double norm = std::sqrt(s2);
  std::vector<double> g(lambda.begin(), lambda.end());
  for (double& x : g) x /= norm;
  return g;
}

}  // namespace

double pearson_scale(double trace, double trace_sq) {
  require_trace_sq(trace_sq, "pearson_scale");
  return trace / trace_sq;
}

double sdof(double trace, double trace_sq) {
  require_trace_sq(trace_sq, "sdof");
  return trace * trace / trace_sq;
}

double poisson_dof(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("poisson_dof: rho must lie in (0, 1)");
  return 2.0 * (1.0 + rho) / (1.0 - rho);
}

double poisson_rho_for_dof(double dof) {
  if (!(dof > 2.0) || !std::isfinite(dof)) throw InvalidArgument("poisson_rho_for_dof: dof must exceed 2");
  return (dof - 2.0) / (dof + 2.0);
}

SatterthwaiteFit satterthwaite_match(double mean, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("satterthwaite_match: variance must be positive");
  return {2.0 * mean / variance, 2.0 * mean * mean / variance};
}

double chi_star_cumulant(std::span<const double> lambda, int r) {
  if (r < 2) throw InvalidArgument("chi_star_cumulant: order must be >= 2");
  const auto g = gamma_weights(lambda, "chi_star_cumulant");
  // kappa_r(chi^2_1) = 2^{r-1} (r-1)!
  const double log_k1 = (r - 1) * std::log(2.0) + std::lgamma(static_cast<double>(r));
  return std::exp(log_k1 - 0.5 * r * std::log(2.0)) * power_sum(g, r);
}

double cumulant_ratio(std::span<const double> lambda, int r) {
  if (r < 3) throw InvalidArgument("cumulant_ratio: order must be >= 3");
  const auto g = gamma_weights(lambda, "cumulant_ratio");
  const double s1 = pairwise_sum(g);
  const double dof = s1 * s1;
  return power_sum(g, r) * std::pow(dof, 0.5 * r - 1.0);
}

CumulantDiagnostics cumulant_diagnostics(std::span<const double> lambda, int r_max) {
  if (r_max < 3) throw InvalidArgument("cumulant_diagnostics: r_max must be >= 3");
  CumulantDiagnostics d;
  d.r_max = r_max;
  d.gamma = gamma_weights(lambda, "cumulant_diagnostics");
  const double s1 = pairwise_sum(d.gamma);
  d.dof = s1 * s1;
  for (int r = 2; r <= r_max; ++r) {
    const double s = power_sum(d.gamma, r);
    d.normed.push_back(s);
    if (r >= 3) d.ratios.push_back(s * std::pow(d.dof, 0.5 * r - 1.0));
  }
  return d;
}

DofRange dof_heuristic_range(std::size_t n, std::size_t dimension) {
  if (n == 0 || dimension == 0) throw InvalidArgument("dof_heuristic_range: n and D must be >= 1");
  DofRange r;
  const double d = static_cast<double>(dimension);
  r.lower = d * (d + 1.0) / 2.0;
  r.upper = static_cast<double>(n) / 5.0;
  if (r.lower > r.upper) {
    r.inverted = true;
    r.warning = "heuristic range is inverted: the sample is too small for the model dimension";
  }
  return r;
}

const char* to_string(DofSource s) noexcept { return s == DofSource::analytic ? "analytic" : "empirical"; }

DofReport make_dof_report(const TraceEstimates& t, DofSource source) {
  DofReport r;
  r.trace = t.trace;
  r.trace_sq = t.trace_sq;
  r.scale = pearson_scale(t.trace, t.trace_sq);
  r.dof = sdof(t.trace, t.trace_sq);
  r.source = source;
  r.method = t.method;
  return r;
}

DofReport null_dof(const CenteredKernel& k) { return make_dof_report(null_traces(k), DofSource::analytic); }

DofReport empirical_dof(const Kernel& k, std::span<const double> sample) {
  const auto m = empirical_center_matrix(build_empirical_matrix(k, sample));
  return make_dof_report(empirical_traces(m), DofSource::empirical);
}

}  // namespace quadfit
