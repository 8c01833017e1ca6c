#pragma once

#include <cstddef>
#include <vector>

namespace quadfit {

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
double hermite(int n, double x);

/// H_n(a x) exp(-b^2 x^2 / 2).
double damped_hermite(int n, double x, double a, double b);

/// h_k(t) * exp(log_factor) for k = 0..count-1, where h_k = H_k / sqrt(2^k k!)
/// are the normalized Hermite polynomials. A running log-scale keeps the
/// recurrence finite for large k and |t|.
std::vector<double> normalized_hermite(std::size_t count, double t, double log_factor = 0.0);

}  // namespace quadfit
