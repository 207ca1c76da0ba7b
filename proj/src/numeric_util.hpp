#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace fshan::numeric {

inline constexpr double kSqrt2Pi = 2.5066282746310002;   // sqrt(2*pi)
inline constexpr double kLog2PiE = 2.8378770664093453;   // log(2*pi*e)

inline double mean(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

// Unbiased sample variance (divisor n-1); two-pass.
inline double sample_variance(std::span<const double> x, double m) {
  double sum = 0.0;
  for (double v : x) {
    const double d = v - m;
    sum += d * d;
  }
  return sum / static_cast<double>(x.size() - 1);
}

// Quantile by linear interpolation of order statistics (type 7): the value
// at position (n-1)*p of the sorted input.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty range");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Trapezoidal rule over uniformly spaced values.
inline double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * step;
}

}  // namespace fshan::numeric
