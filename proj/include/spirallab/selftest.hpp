#pragma once

#include <cstdint>
#include <string>

#include "spirallab/phase.hpp"
#include "spirallab/quadrature.hpp"

namespace spirallab {

struct SelftestReport {
  bool pass = false;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  ///< worst normalized deviation seen
  std::string detail;
};

/// Integration-by-parts identity on seeded random (alpha, beta <= 4) and
/// random angle windows: |residual| <= tol * term scale.
SelftestReport moment_identity_selftest(const Spiral& s, std::uint64_t seed, int cases,
                                        double tol = 1e-8,
                                        const QuadratureConfig& cfg = QuadratureConfig::relative(1e-11));

/// Translation increment: the exact binomial form against a direct quadrature
/// of the shifted-minus-original integrand (relative tol), plus boundedness of
/// |Delta - first order| / eps^2 across six halvings of eps.
SelftestReport translation_increment_selftest(const Spiral& s, std::uint64_t seed, int cases,
                                              double rel_tol = 1e-9,
                                              const QuadratureConfig& cfg = QuadratureConfig::relative(1e-12));

/// Moment/weight comparability: measures the ratio envelope on an (h, eta)
/// grid, then checks fresh seeded samples stay inside the slightly widened
/// envelope and that the ratio is strictly positive everywhere.
SelftestReport ratio_bounds_selftest(const Spiral& s, std::uint64_t seed, int fresh_samples,
                                     double margin = 1.05,
                                     const QuadratureConfig& cfg = QuadratureConfig::relative(1e-10));

}  // namespace spirallab
