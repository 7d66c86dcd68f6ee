#ifndef CGN_LOGSUMEXP_HPP
#define CGN_LOGSUMEXP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace cgn {

// log(sum_i exp(xs[i])), shifted by the maximum so the sum cannot overflow.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;  // all -inf, or a +inf/nan dominates
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace cgn

#endif  // CGN_LOGSUMEXP_HPP
