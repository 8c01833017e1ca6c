#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "quadfit/dof.hpp"
#include "quadfit/error.hpp"
#include "quadfit/gof.hpp"
#include "quadfit/spectral.hpp"
#include "quadfit/trace.hpp"
#include "quadfit_cli/cli.hpp"

namespace quadfit::cli {

namespace {

constexpr std::size_t kHeadLength = 20;

std::optional<double> finite_or_null(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

SpectrumRoute route_from(const std::string& s) {
  if (s == "auto") return SpectrumRoute::automatic;
  if (s == "nystrom") return SpectrumRoute::nystrom;
  if (s == "quadrature") return SpectrumRoute::quadrature;
  if (s == "discrete") return SpectrumRoute::discrete;
  throw InvalidArgument("unknown spectrum route '" + s + "'");
}

SpectrumHead head_of(const SpectralDecomposition& s, bool full) {
  SpectrumHead h;
  const std::size_t keep = full ? s.eigenvalues.size() : std::min(kHeadLength, s.eigenvalues.size());
  h.eigenvalues.assign(s.eigenvalues.begin(), s.eigenvalues.begin() + static_cast<std::ptrdiff_t>(keep));
  h.total_terms = s.eigenvalues.size();
  h.tail_bound = std::isfinite(s.tail_bound) ? s.tail_bound : 0.0;
  h.method = s.method;
  return h;
}

HeuristicRange range_of(const DofRange& r) { return {r.lower, r.upper, r.inverted, r.warning}; }

void fill_traces(Report& rep, double trace, double trace_sq) {
  rep.trace = finite_or_null(trace);
  rep.trace_sq = finite_or_null(trace_sq);
  if (std::isfinite(trace) && trace_sq > 0.0 && std::isfinite(trace_sq)) {
    rep.scale = pearson_scale(trace, trace_sq);
    rep.dof = sdof(trace, trace_sq);
  }
}

Report run_test(const RunConfig& c) {
  Report rep;
  const auto sample = ingest(c.data);
  const auto kernel = parse_kernel(c.kernel);
  GofOptions opts;
  opts.estimator = c.estimator == "u" ? Estimator::u_stat : Estimator::v_stat;
  opts.methods.spectral = std::count(c.pvalues.begin(), c.pvalues.end(), "spectral") > 0;
  opts.methods.satterthwaite = std::count(c.pvalues.begin(), c.pvalues.end(), "satterthwaite") > 0;
  opts.methods.bootstrap = std::count(c.pvalues.begin(), c.pvalues.end(), "bootstrap") > 0;
  opts.draws = c.draws;
  opts.bootstrap_replicates = c.boot;
  opts.seed = *c.seed;
  opts.max_terms = c.max_terms;
  opts.spectrum.route = route_from(c.spectrum_route);
  opts.spectrum.nystrom_points = c.nystrom_points;

  const auto result = c.model.empty() ? simple_null_test(sample, parse_measure(c.null_text), kernel, opts)
                                      : composite_null_test(sample, parse_model(c.model), kernel, opts);
  rep.n = result.n;
  rep.estimator = to_string(result.estimator);
  rep.statistic = result.statistic;
  rep.v_stat = result.v_stat;
  rep.u_stat = finite_or_null(result.u_stat);
  rep.theta = result.theta;
  rep.trace = finite_or_null(result.trace);
  rep.trace_sq = finite_or_null(result.trace_sq);
  rep.scale = finite_or_null(result.scale);
  rep.dof = finite_or_null(result.dof);
  rep.trace_method = result.trace_method;
  rep.heuristic_dof_range = range_of(result.heuristic);
  rep.spectrum = head_of(result.spectrum, c.full_spectrum);
  PValues pv;
  if (result.spectral) pv.spectral = SpectralP{result.spectral->p, result.spectral->mc_se, c.draws};
  pv.satterthwaite = result.satterthwaite;
  if (result.bootstrap)
    pv.bootstrap = BootstrapP{result.bootstrap->p, result.bootstrap->se, result.bootstrap->replicates,
                              result.bootstrap->discarded};
  pv.normal_reference = result.normal_reference;
  rep.pvalues = pv;
  return rep;
}

std::optional<SpectralDecomposition> uncentered_closed_form(const Kernel& k, const BaselineMeasure& g,
                                                            std::size_t max_terms) {
  if (k.family() == KernelFamily::normal) {
    if (const auto* n = g.as<BaselineMeasure::Normal>()) {
      const auto p = mehler_params(k.bandwidth2(), n->variance);
      return normal_spectrum(k.bandwidth2(), n->variance, geometric_terms(p.beta, max_terms), n->mean);
    }
  }
  if (k.family() == KernelFamily::poisson) {
    const auto [lo, hi] = k.period();
    const auto* interval = g.as<BaselineMeasure::UniformInterval>();
    const bool circle = g.as<BaselineMeasure::UniformCircle>() != nullptr && lo == 0.0 && hi == kTwoPi;
    if (circle || (interval != nullptr && interval->lo == lo && interval->hi == hi))
      return poisson_spectrum(k.rho(), geometric_terms(k.rho(), max_terms / 2), false, lo, hi);
  }
  return std::nullopt;
}

Report run_spectrum(const RunConfig& c) {
  Report rep;
  auto kernel = parse_kernel(c.kernel);
  const auto g = parse_measure(c.null_text);
  if (!kernel.bound() && g.is_discrete()) kernel = kernel.bind_reference(g);
  SpectralDecomposition s;
  ScoreSpectrumOptions sopt;
  sopt.seed = c.seed.value_or(0);
  sopt.nystrom_points = c.nystrom_points;
  if (c.centered) {
    const auto ck = center_kernel(kernel, g);
    s = null_spectrum(ck, sopt, c.max_terms);
    const auto t = null_traces(ck);
    fill_traces(rep, t.trace, t.trace_sq);
    rep.trace_method = to_string(t.method);
  } else {
    if (auto cf = uncentered_closed_form(kernel, g, c.max_terms)) {
      s = std::move(*cf);
    } else {
      const auto rule = g.discretization(64);
      if (!rule) throw InvalidArgument("no deterministic discretization of " + g.describe() + "; use --centered");
      s = weighted_eigs(build_empirical_matrix(kernel, rule->nodes).entries, rule->weights);
      s.method = "quadrature";
      const double total = trace_analytic(kernel, g);
      s = truncate_spectrum(std::move(s), 1e-12, c.max_terms,
                            std::isfinite(total) && !g.is_discrete() ? total : std::nan(""));
    }
    fill_traces(rep, trace_analytic(kernel, g), trace_sq_analytic(kernel, g));
    rep.trace_method = "analytic";
  }
  rep.spectrum = head_of(s, c.full_spectrum);
  if (kernel.family() == KernelFamily::normal) {
    if (const auto* n = g.as<BaselineMeasure::Normal>()) {
      const auto p = mehler_params(kernel.bandwidth2(), n->variance);
      rep.mehler = MehlerEcho{p.r, p.w, p.a, p.b, p.alpha, p.beta, p.printed_a, p.printed_alpha};
    }
  }
  return rep;
}

Report run_dof(const RunConfig& c) {
  Report rep;
  auto kernel = parse_kernel(c.kernel);
  DofReport d;
  if (!c.data.empty()) {
    const auto sample = ingest(c.data);
    if (!kernel.bound()) {
      if (c.null_text.empty()) throw InvalidArgument("the pearson kernel needs --null to bind its pmf");
      kernel = kernel.bind_reference(parse_measure(c.null_text));
    }
    d = empirical_dof(kernel, sample);
    rep.n = sample.size();
    rep.heuristic_dof_range = range_of(dof_heuristic_range(sample.size(), 1));
  } else {
    d = null_dof(center_kernel(kernel, parse_measure(c.null_text)));
  }
  fill_traces(rep, d.trace, d.trace_sq);
  rep.trace_method = to_string(d.method);
  return rep;
}

}  // namespace

void RunConfig::validate() const {
  if (command != "test" && command != "spectrum" && command != "dof")
    throw InvalidArgument("unknown command '" + command + "'");
  if (kernel.empty()) throw InvalidArgument("--kernel is required");
  if (estimator != "v" && estimator != "u") throw InvalidArgument("--estimator must be v or u");
  for (const auto& p : pvalues)
    if (p != "spectral" && p != "satterthwaite" && p != "bootstrap")
      throw InvalidArgument("unknown p-value method '" + p + "'");
  (void)route_from(spectrum_route);
  if (max_terms == 0) throw InvalidArgument("--max-terms must be positive");
  if (command == "test") {
    if (data.empty()) throw InvalidArgument("--data is required");
    if (null_text.empty() == model.empty()) throw InvalidArgument("give exactly one of --null and --model");
    if (!seed) throw InvalidArgument("--seed is required for reproducibility");
    if (draws < 1000) throw InvalidArgument("--draws must be at least 1000");
    if (boot < 50) throw InvalidArgument("--boot must be at least 50");
  } else {
    if (!model.empty()) throw InvalidArgument("--model is only valid for the test command");
    if (command == "spectrum" && null_text.empty()) throw InvalidArgument("--baseline is required");
    if (command == "dof" && null_text.empty() && data.empty())
      throw InvalidArgument("give --baseline, --data, or both");
  }
  if (!data.empty() && !std::filesystem::exists(data)) throw InvalidArgument("data file '" + data + "' not found");
}

Report run(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  if (config.command == "test") {
    rep = run_test(config);
  } else if (config.command == "spectrum") {
    rep = run_spectrum(config);
  } else {
    rep = run_dof(config);
  }
  rep.command = config.command;
  rep.config = config;
  rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

int exit_code_for(const std::exception& e) noexcept {
  return dynamic_cast<const RouteRefused*>(&e) != nullptr ? 2 : 1;
}

}  // namespace quadfit::cli
