#pragma once

#include "quadfit/centering.hpp"
#include "quadfit/kernel.hpp"
#include "quadfit/measure.hpp"

namespace quadfit {

enum class TraceMethod { analytic, quadrature, empirical };

const char* to_string(TraceMethod m) noexcept;

/// trace_M(K) = sum of eigenvalues, and trace_M(K^2) = sum of squared
/// eigenvalues.
struct TraceEstimates {
  double trace = 0.0;
  double trace_sq = 0.0;
  TraceMethod method = TraceMethod::analytic;

  bool trace_finite() const noexcept;
};

/// Integral of K(x,x) dM(x); closed form for the built-in kernel/measure
/// pairings, quadrature otherwise. Returns +infinity when the diagonal
/// integral diverges (the kernel is not nuclear under M).
double trace_analytic(const Kernel& k, const BaselineMeasure& m);
double trace_analytic(const CenteredKernel& k);

/// Double integral of K(x,y)^2 dM(x) dM(y); +infinity when the quadrature
/// does not converge.
double trace_sq_analytic(const Kernel& k, const BaselineMeasure& m);
double trace_sq_analytic(const CenteredKernel& k);

/// Both traces of the G-centered kernel, tagged analytic when closed forms
/// (or exact finite sums) were used.
TraceEstimates null_traces(const CenteredKernel& k);

/// tr(M)/n and tr(M^2)/n^2.
TraceEstimates empirical_traces(const EmpiricalKernelMatrix& m);

}  // namespace quadfit
