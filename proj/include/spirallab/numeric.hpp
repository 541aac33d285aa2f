#pragma once

#include <cmath>
#include <stdexcept>

namespace spirallab {

/// Integer power with the convention ipow(x, 0) == 1 for every x (including 0).
/// Exponents in this library are small, so a plain product loop is exact enough
/// and avoids std::pow corner cases for negative bases.
inline double ipow(double x, int n) {
  if (n < 0) throw std::invalid_argument("ipow: negative exponent");
  double r = 1.0;
  double base = x;
  int e = n;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

/// Binomial coefficient as a double; exact for the small arguments used here.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace spirallab
