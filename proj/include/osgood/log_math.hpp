#pragma once

// Overflow-safe helpers for quantities carried as natural logarithms.

#include <algorithm>
#include <cmath>
#include <limits>

namespace osgood::logmath {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

/// log(e^a + e^b).
[[nodiscard]] inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == kPosInf) return kPosInf;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 - e^x) for x <= 0, accurate on both sides of -ln 2.
[[nodiscard]] inline double log1m_exp(double x) {
  if (x > -kLn2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// log(e^a - e^b) for a >= b.
[[nodiscard]] inline double log_sub_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (a == b) return kNegInf;
  return a + log1m_exp(b - a);
}

/// e^x, or +inf when x exceeds the double range.
[[nodiscard]] inline double exp_or_inf(double x) {
  return x > 709.782712893384 ? kPosInf : std::exp(x);
}

}  // namespace osgood::logmath
