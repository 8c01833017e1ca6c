#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quadfit/centering.hpp"
#include "quadfit/trace.hpp"

namespace quadfit {

/// alpha = trace / trace_sq, the rescaling that brings a kernel closest to
/// Pearson form.
double pearson_scale(double trace, double trace_sq);

/// Spectral degrees of freedom trace^2 / trace_sq.
double sdof(double trace, double trace_sq);

/// 2(1 + rho)/(1 - rho) for the centered Poisson kernel.
double poisson_dof(double rho);
/// Inverse of poisson_dof: rho = (d - 2)/(d + 2), d > 2.
double poisson_rho_for_dof(double dof);

struct SatterthwaiteFit {
  double scale = 0.0;
  double dof = 0.0;
};

/// Match mean and variance of scale^-1 * chi^2_dof.
SatterthwaiteFit satterthwaite_match(double mean, double variance);

/// r-th cumulant of the standardized chi-star law with weights lambda.
double chi_star_cumulant(std::span<const double> lambda, int r);

/// kappa_r(standardized chi-star) / kappa_r(standardized chi^2_R), R = sdof.
double cumulant_ratio(std::span<const double> lambda, int r);

struct CumulantDiagnostics {
  std::vector<double> gamma;          // lambda_i / sqrt(sum lambda^2)
  std::vector<double> normed;         // sum gamma^r for r = 2..r_max
  std::vector<double> ratios;         // cumulant_ratio for r = 3..r_max
  double dof = 0.0;
  int r_max = 8;
  double skewness_ratio() const { return ratios.empty() ? 1.0 : ratios.front(); }
};

CumulantDiagnostics cumulant_diagnostics(std::span<const double> lambda, int r_max = 8);

struct DofRange {
  double lower = 0.0;
  double upper = 0.0;
  bool inverted = false;
  std::string warning;
};

/// Advisory range: binomial(D+1, 2) up to n/5.
DofRange dof_heuristic_range(std::size_t n, std::size_t dimension = 1);

enum class DofSource { analytic, empirical };

const char* to_string(DofSource s) noexcept;

struct DofReport {
  double trace = 0.0;
  double trace_sq = 0.0;
  double scale = 0.0;
  double dof = 0.0;
  DofSource source = DofSource::analytic;
  TraceMethod method = TraceMethod::analytic;
};

DofReport make_dof_report(const TraceEstimates& t, DofSource source);

/// DOF from G-centered null traces.
DofReport null_dof(const CenteredKernel& k);

/// DOF from the empirically centered kernel matrix of a sample.
DofReport empirical_dof(const Kernel& k, std::span<const double> sample);

}  // namespace quadfit
