#include "quadfit/hermite.hpp"

#include <cmath>

#include "quadfit/error.hpp"

namespace quadfit {

double hermite(int n, double x) {
  if (n < 0) throw InvalidArgument("hermite: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double damped_hermite(int n, double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("damped_hermite: a and b must be positive");
  return hermite(n, a * x) * std::exp(-0.5 * b * b * x * x);
}

std::vector<double> normalized_hermite(std::size_t count, double t, double log_factor) {
  std::vector<double> out(count);
  if (count == 0) return out;
  constexpr double kBig = 1e150;
  const double log_big = std::log(kBig);
  double log_scale = log_factor;
  double prev = 0.0;
  double cur = 1.0;
  out[0] = std::exp(log_scale);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double kd = static_cast<double>(k);
    const double next = std::sqrt(2.0 / (kd + 1.0)) * t * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += log_big;
    }
    out[k + 1] = cur == 0.0 ? 0.0 : std::copysign(std::exp(log_scale + std::log(std::abs(cur))), cur);
  }
  return out;
}

}  // namespace quadfit
