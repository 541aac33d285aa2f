#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "spirallab/quadrature.hpp"

namespace spirallab {

/// Phase function phi of a planar spiral t -> t * e^{i phi(t)} on (0, T].
///
/// The shipped families are strictly decreasing with phi -> +inf and
/// phi_dot -> -inf at the centre (the double-log family keeps t*phi_dot
/// bounded, so its spiral is Lipschitz). Tabulated phases are interpolated
/// with cubic Hermite segments and carry no asymptotic guarantees.
class Phase {
 public:
  enum class Family { Power, LogPower, ScaledDoubleLog, Tabulated };

  /// phi(t) = t^(-a), 0 < a < 1.
  static Phase power(double exponent, double domain_end = 1.0);
  /// phi(t) = (-log t)^q, q > 1. Default domain end exp(-1) keeps phi(T) = 1.
  static Phase log_power(double exponent, double domain_end = std::exp(-1.0));
  /// phi(t) = M * log(-log t). M = 1 winds so slowly that already the second
  /// axis crossing underflows doubles; experiments default to M = 50.
  static Phase scaled_double_log(double scale = 50.0, double domain_end = 0.5);
  /// Sampled (t, phi, phi_dot) triples, t strictly increasing. Flagged as
  /// having unverified asymptotics.
  static Phase tabulated(std::vector<double> t, std::vector<double> phi,
                         std::vector<double> phi_dot);

  Family family() const { return family_; }
  double parameter() const { return param_; }
  double domain_end() const { return domain_end_; }
  /// Smallest admissible time (> 0 only for tabulated phases).
  double domain_start() const;
  /// phi(T): angles below this are outside the inverse's range.
  double min_angle() const { return min_angle_; }
  bool unverified_asymptotics() const { return family_ == Family::Tabulated; }

  double phi(double t) const;
  double phi_dot(double t) const;

  /// Inverse of phi: closed form for the shipped families, otherwise
  /// safeguarded bisection on a bracket found by geometric scanning
  /// (relative tolerance 1e-14 in t). Angles below phi(T) are rejected.
  double psi(double angle) const;

 private:
  struct Table {
    std::vector<double> t, phi, phid;
  };

  Phase(Family f, double param, double domain_end);

  double phi_unchecked(double t) const;
  double psi_bisect(double angle) const;

  Family family_;
  double param_ = 0.0;
  double domain_end_ = 1.0;
  double min_angle_ = 0.0;
  std::shared_ptr<const Table> table_;
};

struct PhaseDiagnostics {
  bool monotone_decreasing = false;  ///< phi strictly decreasing on the sample
  bool phi_dot_negative = false;
  double phi_span = 0.0;        ///< phi(t_min sample) - phi(T)
  double phi_dot_ratio = 0.0;   ///< |phi_dot| growth factor toward the centre
  double sup_t_phi_dot = 0.0;   ///< sup |t * phi_dot(t)| over the sample
  bool unverified_asymptotics = false;
};

/// Numerical check of the phase contract on a geometric sample t_j -> 0.
PhaseDiagnostics diagnose_phase(const Phase& phase, int samples = 48);

/// Planar spiral kappa(t) = t * e^{i phi(t)} with |kappa(t)| = t.
class Spiral {
 public:
  explicit Spiral(Phase phase) : phase_(std::move(phase)) {}

  const Phase& phase() const { return phase_; }
  double domain_end() const { return phase_.domain_end(); }

  Eigen::Vector2d kappa(double t) const;
  Eigen::Vector2d kappa_dot(double t) const;
  /// d kappa_2 / dt = sin(phi) + t cos(phi) phi_dot; the lift integrals are
  /// all taken against this component.
  double kappa2_dot(double t) const;

  /// Time of the given winding angle: psi(angle).
  double t_angle(double angle) const { return phase_.psi(angle); }
  /// Positive-x1-axis crossing: psi(2 pi k).
  double t_k(int k) const;
  /// psi(2 pi k + eta), eta in [0, 2 pi).
  double t_k_eta(int k, double eta) const;

 private:
  Phase phase_;
};

/// Arc length of the spiral between a and b: integral of sqrt(1 + t^2 phi_dot^2).
/// Always at least b - a (chord bound along the radius).
QuadResult arc_length(const Spiral& s, double a, double b, const QuadratureConfig& cfg = {});

/// Sup over a sampled window [a, b] of |kappa(lambda_n t) / lambda_n - t v|
/// for lambda_n = psi(2 pi n + arg v), one entry per n. For the scaled
/// double-log family the sequence decreases toward zero; for other families
/// it is reported without any convergence claim.
std::vector<double> blowup_distances(const Spiral& s, const Eigen::Vector2d& v,
                                     const std::vector<int>& n_list, double window_a,
                                     double window_b, int grid = 512);

}  // namespace spirallab
