#include "spirallab/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "spirallab/calculus.hpp"
#include "spirallab/numeric.hpp"

namespace spirallab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SelftestReport moment_identity_selftest(const Spiral& s, std::uint64_t seed, int cases,
                                        double tol, const QuadratureConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> exponent(0, 4);
  std::uniform_int_distribution<int> turn(1, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SelftestReport rep;
  rep.cases = cases;
  for (int c = 0; c < cases; ++c) {
    const int alpha = exponent(rng);
    const int beta = exponent(rng);
    const int h = turn(rng);
    const double omega = kTwoPi * h + unit(rng) * kTwoPi;
    const AngleWindow w{omega, omega + unit(rng) * 3.0 * kTwoPi};

    const QuadResult res = moment_identity_residual(s, alpha, beta, w, cfg);
    const int p = alpha + beta + 2;
    const double t_omega = s.t_angle(w.omega);
    const double t_eta = s.t_angle(w.eta_end);
    const double scale =
        std::abs(p * moment_integral(s, alpha, beta, w, cfg).value) +
        std::abs(ipow(t_omega, p) * boundary_term(alpha, beta, w.omega)) +
        std::abs(ipow(t_eta, p) * boundary_term(alpha, beta, w.eta_end)) +
        std::abs((alpha + 1) * angle_moment_integral(s, alpha, beta, w, cfg).value) + 1e-300;
    const double normalized = std::abs(res.value) / scale;
    rep.worst = std::max(rep.worst, normalized / tol);
    if (normalized > tol) ++rep.failures;
  }
  rep.pass = rep.failures == 0;
  std::ostringstream os;
  os << "worst residual at " << rep.worst << " of tolerance";
  rep.detail = os.str();
  return rep;
}

SelftestReport translation_increment_selftest(const Spiral& s, std::uint64_t seed, int cases,
                                              double rel_tol, const QuadratureConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> exponent(0, 4);
  std::uniform_int_distribution<int> turn(1, 20);
  std::uniform_real_distribution<double> eta_draw(0.05, 0.78);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);

  SelftestReport rep;
  rep.cases = cases;
  for (int c = 0; c < cases; ++c) {
    const int alpha = exponent(rng);
    const int beta = exponent(rng);
    const int h = turn(rng);
    const double eta = eta_draw(rng);
    const double t_he = s.t_k_eta(h, eta);
    const double t_h = s.t_k(h);
    const double eps = sgn(rng) * 0.8 * t_he;

    const double by_moments = translation_increment(s, alpha, beta, h, eta, eps, cfg);
    const QuadResult direct = integrate(
        [&](double t) {
          const Eigen::Vector2d p = s.kappa(t);
          return (ipow(p[0] + eps, alpha + 1) - ipow(p[0], alpha + 1)) * ipow(p[1], beta) *
                 s.kappa2_dot(t);
        },
        t_he, t_h, cfg);

    // Scale of the binomial terms, for the near-cancellation floor.
    std::vector<double> moments(alpha + 1);
    for (int i = 0; i <= alpha; ++i)
      moments[i] = moment_integral(s, i - 1, beta, device_window(h, eta), cfg).value;
    double term_scale = 1e-300;
    for (int i = 0; i <= alpha; ++i)
      term_scale += std::abs(binomial(alpha + 1, i) * ipow(eps, alpha + 1 - i) * moments[i]);

    const double diff = std::abs(by_moments - direct.value);
    const double allowed =
        std::max(rel_tol * std::max(std::abs(by_moments), std::abs(direct.value)),
                 1e-12 * term_scale);
    rep.worst = std::max(rep.worst, diff / allowed);
    bool ok = diff <= allowed;

    // First-order check: q(eps) = |Delta - (alpha+1) eps I^{alpha-1,beta}| / eps^2
    // stays bounded across six halvings (quadrature noise gets its own allowance).
    const double lead = (alpha + 1) * moments.back();
    double q0 = -1.0, q1 = -1.0;
    for (int mlt = 0; mlt < 6; ++mlt) {
      const double e = eps / ipow(2.0, mlt) / 2.0;
      const double delta = translation_increment_from_moments(moments, alpha, e);
      const double q = std::abs(delta - lead * e) / (e * e);
      if (mlt == 0) q0 = q;
      if (mlt == 1) q1 = q;
      if (mlt >= 2) {
        const double noise = 1e-12 * term_scale / (e * e);
        if (q > 2.0 * std::max(q0, q1) + 10.0 * noise) ok = false;
      }
    }
    if (!ok) ++rep.failures;
  }
  rep.pass = rep.failures == 0;
  std::ostringstream os;
  os << "worst binomial-vs-direct deviation at " << rep.worst << " of tolerance";
  rep.detail = os.str();
  return rep;
}

SelftestReport ratio_bounds_selftest(const Spiral& s, std::uint64_t seed, int fresh_samples,
                                     double margin, const QuadratureConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> turn(2, 40);
  std::uniform_real_distribution<double> eta_draw(0.05, 0.7);

  SelftestReport rep;
  const std::pair<int, int> pairs[] = {{0, 0}, {1, 0}, {0, 1}, {2, 1}};
  for (const auto& [alpha, beta] : pairs) {
    const RatioBounds env = ratio_sweep(s, alpha, beta, 2, 40, 0.05, 0.7, 26, cfg);
    if (!(env.lo > 0.0)) {
      ++rep.failures;
      continue;
    }
    for (int c = 0; c < fresh_samples; ++c) {
      ++rep.cases;
      const double r = moment_weight_ratio(s, alpha, beta, turn(rng), eta_draw(rng), cfg);
      rep.worst = std::max({rep.worst, r / env.hi, env.lo / std::max(r, 1e-300)});
      if (!(r > 0.0) || r < env.lo / margin || r > env.hi * margin) ++rep.failures;
    }
  }
  rep.pass = rep.failures == 0;
  std::ostringstream os;
  os << "worst envelope excursion factor " << rep.worst;
  rep.detail = os.str();
  return rep;
}

}  // namespace spirallab
