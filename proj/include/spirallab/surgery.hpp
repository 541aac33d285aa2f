#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "spirallab/calculus.hpp"
#include "spirallab/model.hpp"
#include "spirallab/phase.hpp"

namespace spirallab {

/// Correction device acting on the window [t_{h eta}, t_h]: the planar curve
/// is shifted by (eps, 0) there, at the cost of two horizontal segments of
/// length |eps| each.
struct DeviceTriple {
  int h = 0;
  double eta = 0.0;
  double eps = 0.0;
};

/// Cut index plus devices listed innermost-first (descending h, all h below
/// the cut index). cut_k == 0 disables the cut.
struct DeviceSet {
  int cut_k = 0;
  std::vector<DeviceTriple> devices;
};

struct PathInterval {
  enum class Kind { Base, Chord, Translated };
  Kind kind = Kind::Base;
  double t0 = 0.0;
  double t1 = 0.0;
  double eps = 0.0;  ///< translation offset (Translated only)
  std::string label;
};

/// Piecewise description of the modified planar curve:
///   - on the cut window [t_{k+1}, t_k] it runs along the axis, (t, 0);
///   - on each device window it is the spiral shifted by (eps_j, 0);
///   - elsewhere it coincides with the spiral.
/// Horizontal segments inserted by the devices carry no x2 variation, so they
/// are bookkept for length only and never integrated in lifts.
class ModifiedPath {
 public:
  ModifiedPath(Spiral spiral, DeviceSet set);

  const Spiral& spiral() const { return spiral_; }
  const DeviceSet& device_set() const { return set_; }
  bool has_cut() const { return set_.cut_k > 0; }

  double t_cut_lo() const;  ///< t_{k+1}; requires a cut
  double t_cut_hi() const;  ///< t_k; requires a cut

  /// Full labelled partition of [start of surgery, final device time].
  const std::vector<PathInterval>& intervals() const { return intervals_; }
  /// First time at which the path may differ from the spiral; equals the
  /// final time when there is no surgery at all.
  double modified_start() const { return modified_start_; }
  /// Final device time t_h of the last device (or t_k for a cut-only path).
  double final_time() const { return final_time_; }
  double segment_extra_length() const;  ///< 2 sum |eps_j|

  Eigen::Vector2d point(double t) const;

 private:
  Spiral spiral_;
  DeviceSet set_;
  std::vector<PathInterval> intervals_;
  double modified_start_ = 0.0;
  double final_time_ = 0.0;
};

ModifiedPath build_modified_path(const Spiral& s, const DeviceSet& set);

struct LiftResult {
  Eigen::VectorXd endpoint;  ///< gamma_3 .. gamma_n
  double error_estimate = 0.0;
  bool converged = true;
};

/// Horizontal lift endpoints of the plain spiral from t_start to t_end, one
/// integral per coordinate: gamma_i = integral of a_i(kappa) kappa2_dot.
/// Extra breakpoints split the quadrature (used to mirror a modified path's
/// panel structure so that shared stretches cancel exactly in differences).
LiftResult horizontal_lift(const Spiral& s, const StratifiedModel& m, double t_start,
                           double t_end, const QuadratureConfig& cfg = {},
                           const std::vector<double>& breakpoints = {});

/// Lift of the modified path over [t_start, t_end]; chord pieces contribute
/// exactly zero and are skipped rather than integrated.
LiftResult horizontal_lift(const ModifiedPath& path, const StratifiedModel& m, double t_start,
                           double t_end, const QuadratureConfig& cfg = {});

/// Reported bound on the lift mass below t_min (diagnostic; the endpoint
/// error itself is independent of the shared lower limit).
double lift_tail_bound(const Spiral& s, const StratifiedModel& m, int coordinate, double t_min,
                       const QuadratureConfig& cfg = {});

struct EndpointError {
  Eigen::VectorXd error;  ///< E_i = gamma_i - gamma_bar_i at the final time
  double error_estimate = 0.0;
  /// max(1, sup-norm of the unmodified lift), the natural scale for endpoint
  /// tolerance checks.
  double scale = 1.0;
  bool converged = true;
};

/// Endpoint error by two full lifts over the same range and panel structure.
EndpointError endpoint_error_direct(const ModifiedPath& path, const StratifiedModel& m,
                                    const QuadratureConfig& cfg = {});

/// Endpoint error assembled window by window: the cut contributes the
/// full-turn moment plus a remainder integral, each device contributes the
/// negated translation increment plus its remainder difference. The gaps
/// between marked windows cancel identically and are not integrated.
struct EndpointBreakdown {
  Eigen::VectorXd total;
  Eigen::VectorXd cut_monomial;
  Eigen::VectorXd cut_remainder;
  Eigen::MatrixXd device_monomial;   ///< (coordinate, device)
  Eigen::MatrixXd device_remainder;  ///< (coordinate, device)
  double error_estimate = 0.0;
  bool converged = true;
};

EndpointBreakdown endpoint_error_decomposed(const ModifiedPath& path, const StratifiedModel& m,
                                            const QuadratureConfig& cfg = {});

/// Length gain of the surgery, positive when the modified curve is shorter.
/// Two independent routes must agree:
///   gain      = integral over the cut of t^2 phi_dot^2 / (sqrt(1+t^2 phi_dot^2)+1)
///               minus the inserted segments, using the algebraic identity
///               sqrt(1+x^2) - 1 = x^2 / (sqrt(1+x^2) + 1);
///   bookkeeping = spire arc minus chord minus segments, assembled from the
///               per-interval arc lengths of both curves.
struct LengthGain {
  double gain = 0.0;
  double gain_bookkeeping = 0.0;
  double spire_arc = 0.0;
  double chord = 0.0;
  double segment_extra = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

LengthGain length_gain(const ModifiedPath& path, const QuadratureConfig& cfg = {});

/// Length of the modified curve between t_start and t_end, including the
/// inserted segments of every device window inside the range.
QuadResult modified_length(const ModifiedPath& path, double t_start, double t_end,
                           const QuadratureConfig& cfg = {});

/// Per-coordinate ratio |integral of Delta_i over the cut| /
/// integral of t^(alpha_i+beta_i+2) |phi_dot| over the cut. At most 1 for
/// pure monomial models; remainders add a higher-order allowance.
std::vector<double> cut_bound_ratios(const Spiral& s, const StratifiedModel& m, int k,
                                     const QuadratureConfig& cfg = {});

/// Ratio |integral of the remainder difference over the device window| /
/// (|eps| * integral of t^{w_i} |phi_dot|); finite, measured per model.
double device_remainder_bound_ratio(const Spiral& s, const StratifiedModel& m, int coordinate,
                                    const DeviceTriple& device,
                                    const QuadratureConfig& cfg = {});

}  // namespace spirallab
