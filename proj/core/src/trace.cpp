#include "quadfit/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "quadfit/error.hpp"

namespace quadfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ClosedForm {
  double trace;
  double trace_sq;
};

bool poisson_matches(const Kernel& k, const BaselineMeasure& m) {
  if (k.family() != KernelFamily::poisson) return false;
  const auto [lo, hi] = k.period();
  if (m.as<BaselineMeasure::UniformCircle>() != nullptr) return lo == 0.0 && hi == kTwoPi;
  const auto* u = m.as<BaselineMeasure::UniformInterval>();
  return u != nullptr && u->lo == lo && u->hi == hi;
}

bool cvm_matches(const Kernel& k, const BaselineMeasure& m) {
  const auto* u = m.as<BaselineMeasure::UniformInterval>();
  return k.family() == KernelFamily::cvm && u != nullptr && u->lo == 0.0 && u->hi == 1.0;
}

// Gaussian pieces of the normal/normal traces.
double normal_sq_integral(double h2, double sigma2) {
  // E phi(X-Y; h2)^2 for X, Y iid N(mu, sigma2)
  return normal_density(0.0, 0.5 * h2 + 2.0 * sigma2) / (2.0 * std::sqrt(std::numbers::pi * h2));
}

std::optional<ClosedForm> closed_form(const Kernel& k, const BaselineMeasure& m, bool centered) {
  if (poisson_matches(k, m)) {
    const double rho = k.rho();
    const double tr = 2.0 * rho / (1.0 - rho);
    const double tr2 = 2.0 * rho * rho / (1.0 - rho * rho);
    return centered ? ClosedForm{tr, tr2} : ClosedForm{1.0 + tr, 1.0 + tr2};
  }
  if (cvm_matches(k, m)) return centered ? ClosedForm{1.0 / 6.0, 1.0 / 90.0} : ClosedForm{0.5, 1.0 / 6.0};
  const auto* g = m.as<BaselineMeasure::Normal>();
  if (k.family() == KernelFamily::normal && g != nullptr) {
    const double h2 = k.bandwidth2();
    const double s2 = g->variance;
    const double diag = normal_density(0.0, h2);
    const double kk = normal_sq_integral(h2, s2);
    if (!centered) return ClosedForm{diag, kk};
    const double kgg = normal_density(0.0, h2 + 2.0 * s2);
    const double v = h2 + s2;  // K(x,G) = phi(x - mu; v)
    const double one_point_sq = normal_density(0.0, 0.5 * v + s2) / (2.0 * std::sqrt(std::numbers::pi * v));
    return ClosedForm{diag - kgg, kk - 2.0 * one_point_sq + kgg * kgg};
  }
  return std::nullopt;
}

double diagonal_integral(const BaselineMeasure& m, const std::function<double(double)>& diag) {
  try {
    const double v = m.integrate([&](double x) {
      const double d = diag(x);
      if (!std::isfinite(d)) throw IntegrationError("non-finite diagonal");
      return d;
    });
    return std::isfinite(v) ? v : kInf;
  } catch (const IntegrationError&) {
    return kInf;
  }
}

double square_integral(const BaselineMeasure& m, const std::function<double(double, double)>& k) {
  try {
    const double v = m.integrate([&](double x) {
      const double cut[] = {x};
      return m.integrate(
          [&](double y) {
            const double v = k(x, y);
            if (!std::isfinite(v)) throw IntegrationError("non-finite kernel value");
            return v * v;
          },
          cut);
    });
    return std::isfinite(v) ? v : kInf;
  } catch (const IntegrationError&) {
    return kInf;
  }
}

}  // namespace

const char* to_string(TraceMethod m) noexcept {
  switch (m) {
    case TraceMethod::analytic:
      return "analytic";
    case TraceMethod::quadrature:
      return "quadrature";
    case TraceMethod::empirical:
      return "empirical";
  }
  return "unknown";
}

bool TraceEstimates::trace_finite() const noexcept { return std::isfinite(trace); }

double trace_analytic(const Kernel& k, const BaselineMeasure& m) {
  if (auto cf = closed_form(k, m, false)) return cf->trace;
  return diagonal_integral(m, [&](double x) { return k(x, x); });
}

double trace_analytic(const CenteredKernel& k) {
  if (auto cf = closed_form(k.base(), k.center(), true)) return cf->trace;
  return diagonal_integral(k.center(), [&](double x) { return k(x, x); });
}

double trace_sq_analytic(const Kernel& k, const BaselineMeasure& m) {
  if (auto cf = closed_form(k, m, false)) return cf->trace_sq;
  return square_integral(m, [&](double x, double y) { return k(x, y); });
}

double trace_sq_analytic(const CenteredKernel& k) {
  if (auto cf = closed_form(k.base(), k.center(), true)) return cf->trace_sq;
  if (k.closed_form()) return square_integral(k.center(), [&](double x, double y) { return k(x, y); });
  // One-point means by quadrature: expand the square so no integrand nests a
  // further integral inside the double integral.
  const auto& m = k.center();
  const double raw = square_integral(m, [&](double x, double y) { return k.base()(x, y); });
  if (!std::isfinite(raw)) return kInf;
  const double means = diagonal_integral(m, [&](double x) {
    const double v = k.one_point(x);
    return v * v;
  });
  if (!std::isfinite(means)) return kInf;
  return std::max(0.0, raw - 2.0 * means + k.grand() * k.grand());
}

TraceEstimates null_traces(const CenteredKernel& k) {
  TraceEstimates t;
  const bool exact = closed_form(k.base(), k.center(), true).has_value() || k.center().is_discrete();
  t.method = exact ? TraceMethod::analytic : TraceMethod::quadrature;
  t.trace = trace_analytic(k);
  t.trace_sq = trace_sq_analytic(k);
  return t;
}

TraceEstimates empirical_traces(const EmpiricalKernelMatrix& m) {
  const auto n = m.entries.rows();
  if (n == 0) throw InvalidArgument("empirical_traces: empty matrix");
  const double nd = static_cast<double>(n);
  TraceEstimates t;
  t.method = TraceMethod::empirical;
  t.trace = m.entries.trace() / nd;
  t.trace_sq = m.entries.squaredNorm() / (nd * nd);
  return t;
}

}  // namespace quadfit
