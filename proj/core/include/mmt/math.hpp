#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

namespace mmt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
/// Upper tail P(N > x).
inline double normal_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// log Σ exp(v); -inf entries are skipped, an all -inf input yields -inf.
inline double log_sum_exp(std::span<const double> v) {
  double hi = -kInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

/// H_b(p) in nats.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (61-point) on [a, b]; infinite endpoints allowed.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           unsigned max_depth = 20);

}  // namespace mmt
