#pragma once

#include "spirallab/phase.hpp"
#include "spirallab/quadrature.hpp"

namespace spirallab {

/// Angle window [omega, eta_end] with omega <= eta_end; in time it maps to
/// [psi(eta_end), psi(omega)], i.e. larger angles sit closer to the centre.
struct AngleWindow {
  double omega = 0.0;
  double eta_end = 0.0;
};

AngleWindow full_turn_window(int k);
AngleWindow device_window(int h, double eta);

/// Moment of the spiral against d kappa_2 over the window:
///   integral of kappa_1^(alpha+1) kappa_2^beta kappa_2_dot dt
/// on [psi(eta_end), psi(omega)]. alpha >= -1 is allowed; alpha = -1 makes the
/// integrand an exact derivative of kappa_2^(beta+1) / (beta+1).
QuadResult moment_integral(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                           const QuadratureConfig& cfg = {});

/// Companion moment in the angle variable:
///   integral over [omega, eta_end] of psi(theta)^(alpha+beta+2) cos^alpha sin^beta.
/// Requires alpha >= 0.
QuadResult angle_moment_integral(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                                 const QuadratureConfig& cfg = {});

/// cos^(alpha+1)(omega) * sin^(beta+1)(omega); vanishes at full turns.
double boundary_term(int alpha, int beta, double omega);

/// Residual of the integration-by-parts identity tying the two moments:
///   (a+b+2) I - [t_omega^(a+b+2) D(omega) - t_eta^(a+b+2) D(eta) - (a+1) J].
/// Must vanish up to the combined quadrature tolerance; the returned error
/// field carries that combined estimate. Requires alpha >= 0.
QuadResult moment_identity_residual(const Spiral& s, int alpha, int beta, const AngleWindow& w,
                                    const QuadratureConfig& cfg = {});

/// Comparison weight for a device window [2 pi h, 2 pi h + eta]:
///   eta^beta * integral of psi(theta)^(alpha+beta+2) d theta.
/// The same quantity in the time variable is
///   eta^beta * integral over [t_{h eta}, t_h] of t^(alpha+beta+2) |phi_dot|,
/// exposed separately as a change-of-variables cross-check. alpha >= -1.
QuadResult comparison_weight(const Spiral& s, int alpha, int beta, int h, double eta,
                             const QuadratureConfig& cfg = {});
QuadResult comparison_weight_time_side(const Spiral& s, int alpha, int beta, int h, double eta,
                                       const QuadratureConfig& cfg = {});

/// |moment| / weight over a device window. Strictly positive and bounded
/// above and below by constants depending only on (alpha, beta); the
/// constants themselves are measured per phase family, not derived.
/// Returns 0 for an empty window. alpha >= -1.
double moment_weight_ratio(const Spiral& s, int alpha, int beta, int h, double eta,
                           const QuadratureConfig& cfg = {});

struct RatioBounds {
  double lo = 0.0;
  double hi = 0.0;
  int samples = 0;
};

/// Envelope of moment_weight_ratio over an (h, eta) grid.
RatioBounds ratio_sweep(const Spiral& s, int alpha, int beta, int h_min, int h_max,
                        double eta_min, double eta_max, int eta_steps,
                        const QuadratureConfig& cfg = {});

/// Change of the monomial moment under a rigid x1-translation by eps on the
/// device window [t_{h eta}, t_h], in exact binomial form:
///   sum_{i=0}^{alpha} C(alpha+1, i) eps^(alpha+1-i) I^{i-1, beta}.
/// First order in eps this is (alpha+1) eps I^{alpha-1, beta}.
/// Requires alpha >= 0 and |eps| < t_{h eta}.
double translation_increment(const Spiral& s, int alpha, int beta, int h, double eta, double eps,
                             const QuadratureConfig& cfg = {});

/// Same increment evaluated from precomputed moments I^{i-1, beta}
/// (index i = 0..alpha), so Newton iterations can reuse the quadratures.
double translation_increment_from_moments(const std::vector<double>& moments, int alpha,
                                          double eps);

/// d/d eps of the increment, from the same precomputed moments.
double translation_increment_derivative(const std::vector<double>& moments, int alpha,
                                        double eps);

}  // namespace spirallab
