// Test-only oracles, independent of the library's quadrature and evaluation
// paths: composite Simpson on a fixed grid, central finite differences, and a
// tiny deterministic RNG wrapper.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oracles {

/// Composite Simpson on n panels (n rounded up to even).
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Central difference derivative with step h.
template <class F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

}  // namespace oracles
