#include "spirallab/calculus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spirallab/numeric.hpp"

namespace spirallab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuarterPi = 0.25 * std::numbers::pi;

void require_window(const Spiral& s, const AngleWindow& w) {
  if (!(w.omega <= w.eta_end))
    throw std::invalid_argument("angle window: omega must not exceed eta_end");
  if (w.omega < s.phase().min_angle())
    throw std::invalid_argument("angle window: omega below phi(T)");
}

void require_device_angles(int h, double eta) {
  if (h < 1) throw std::invalid_argument("device window: h must be a positive integer");
  if (!(eta > 0.0 && eta < kQuarterPi))
    throw std::invalid_argument("device window: eta must lie in (0, pi/4)");
}

}  // namespace

AngleWindow full_turn_window(int k) { return {kTwoPi * k, kTwoPi * (k + 1)}; }

AngleWindow device_window(int h, double eta) { return {kTwoPi * h, kTwoPi * h + eta}; }

QuadResult moment_integral(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                           const QuadratureConfig& cfg) {
  if (alpha < -1) throw std::invalid_argument("moment_integral: alpha must be >= -1");
  if (beta < 0) throw std::invalid_argument("moment_integral: beta must be >= 0");
  require_window(s, w);
  if (w.omega == w.eta_end) return {};
  const double t_lo = s.t_angle(w.eta_end);
  const double t_hi = s.t_angle(w.omega);
  return integrate(
      [&s, alpha, beta](double t) {
        const Eigen::Vector2d k = s.kappa(t);
        return ipow(k[0], alpha + 1) * ipow(k[1], beta) * s.kappa2_dot(t);
      },
      t_lo, t_hi, cfg);
}

QuadResult angle_moment_integral(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                                 const QuadratureConfig& cfg) {
  if (alpha < 0) throw std::invalid_argument("angle_moment_integral: alpha must be >= 0");
  if (beta < 0) throw std::invalid_argument("angle_moment_integral: beta must be >= 0");
  require_window(s, w);
  if (w.omega == w.eta_end) return {};
  const Phase& phase = s.phase();
  return integrate(
      [&phase, alpha, beta](double theta) {
        return ipow(phase.psi(theta), alpha + beta + 2) * ipow(std::cos(theta), alpha) *
               ipow(std::sin(theta), beta);
      },
      w.omega, w.eta_end, cfg);
}

double boundary_term(int alpha, int beta, double omega) {
  return ipow(std::cos(omega), alpha + 1) * ipow(std::sin(omega), beta + 1);
}

QuadResult moment_identity_residual(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                                    const QuadratureConfig& cfg) {
  if (alpha < 0) throw std::invalid_argument("moment_identity_residual: alpha must be >= 0");
  const QuadResult i = moment_integral(s, alpha, beta, w, cfg);
  const QuadResult j = angle_moment_integral(s, alpha, beta, w, cfg);
  const int p = alpha + beta + 2;
  const double t_omega = s.t_angle(w.omega);
  const double t_eta = s.t_angle(w.eta_end);
  const double boundary = ipow(t_omega, p) * boundary_term(alpha, beta, w.omega) -
                          ipow(t_eta, p) * boundary_term(alpha, beta, w.eta_end);
  QuadResult out;
  out.value = p * i.value - (boundary - (alpha + 1) * j.value);
  out.error = p * i.error + (alpha + 1) * j.error;
  out.converged = i.converged && j.converged;
  out.panels = i.panels + j.panels;
  out.depth = std::max(i.depth, j.depth);
  return out;
}

QuadResult comparison_weight(const Spiral& s, int alpha, int beta, int h, double eta,
                             const QuadratureConfig& cfg) {
  if (alpha < -1) throw std::invalid_argument("comparison_weight: alpha must be >= -1");
  if (beta < 0) throw std::invalid_argument("comparison_weight: beta must be >= 0");
  require_device_angles(h, eta);
  const Phase& phase = s.phase();
  QuadResult r = integrate(
      [&phase, alpha, beta](double theta) { return ipow(phase.psi(theta), alpha + beta + 2); },
      kTwoPi * h, kTwoPi * h + eta, cfg);
  const double scale = ipow(eta, beta);
  r.value *= scale;
  r.error *= scale;
  r.l1 *= scale;
  return r;
}

QuadResult comparison_weight_time_side(const Spiral& s, int alpha, int beta, int h, double eta,
                                       const QuadratureConfig& cfg) {
  if (alpha < -1) throw std::invalid_argument("comparison_weight: alpha must be >= -1");
  if (beta < 0) throw std::invalid_argument("comparison_weight: beta must be >= 0");
  require_device_angles(h, eta);
  const Phase& phase = s.phase();
  QuadResult r = integrate(
      [&phase, alpha, beta](double t) {
        return ipow(t, alpha + beta + 2) * std::abs(phase.phi_dot(t));
      },
      s.t_k_eta(h, eta), s.t_k(h), cfg);
  const double scale = ipow(eta, beta);
  r.value *= scale;
  r.error *= scale;
  r.l1 *= scale;
  return r;
}

double moment_weight_ratio(const Spiral& s, int alpha, int beta, int h, double eta,
                           const QuadratureConfig& cfg) {
  const double w = comparison_weight(s, alpha, beta, h, eta, cfg).value;
  if (w == 0.0) return 0.0;
  const double i = moment_integral(s, alpha, beta, device_window(h, eta), cfg).value;
  return std::abs(i) / w;
}

RatioBounds ratio_sweep(const Spiral& s, int alpha, int beta, int h_min, int h_max,
                        double eta_min, double eta_max, int eta_steps,
                        const QuadratureConfig& cfg) {
  RatioBounds b;
  b.lo = std::numeric_limits<double>::infinity();
  for (int h = h_min; h <= h_max; ++h) {
    for (int e = 0; e <= eta_steps; ++e) {
      const double eta = eta_min + (eta_max - eta_min) * e / eta_steps;
      const double r = moment_weight_ratio(s, alpha, beta, h, eta, cfg);
      b.lo = std::min(b.lo, r);
      b.hi = std::max(b.hi, r);
      ++b.samples;
    }
  }
  return b;
}

double translation_increment(const Spiral& s, int alpha, int beta, int h, double eta, double eps,
                             const QuadratureConfig& cfg) {
  if (alpha < 0) throw std::invalid_argument("translation_increment: alpha must be >= 0");
  require_device_angles(h, eta);
  if (!(std::abs(eps) < s.t_k_eta(h, eta)))
    throw std::invalid_argument("translation_increment: |eps| must stay below t_{h eta}");
  std::vector<double> moments(alpha + 1);
  for (int i = 0; i <= alpha; ++i)
    moments[i] = moment_integral(s, i - 1, beta, device_window(h, eta), cfg).value;
  return translation_increment_from_moments(moments, alpha, eps);
}

double translation_increment_from_moments(const std::vector<double>& moments, int alpha,
                                          double eps) {
  if (static_cast<int>(moments.size()) != alpha + 1)
    throw std::invalid_argument("translation_increment: expected alpha + 1 moments");
  double sum = 0.0;
  for (int i = 0; i <= alpha; ++i)
    sum += binomial(alpha + 1, i) * ipow(eps, alpha + 1 - i) * moments[i];
  return sum;
}

double translation_increment_derivative(const std::vector<double>& moments, int alpha,
                                        double eps) {
  if (static_cast<int>(moments.size()) != alpha + 1)
    throw std::invalid_argument("translation_increment: expected alpha + 1 moments");
  double sum = 0.0;
  for (int i = 0; i <= alpha; ++i)
    sum += binomial(alpha, i) * ipow(eps, alpha - i) * moments[i];
  return (alpha + 1) * sum;
}

}  // namespace spirallab
