#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "spirallab/model.hpp"
#include "spirallab/phase.hpp"
#include "spirallab/quadrature.hpp"
#include "spirallab/surgery.hpp"

namespace spirallab {

/// Total order on layer exponent pairs: first by alpha + beta, ties by beta.
/// The minimal pair owns the dominant column entry when devices are pushed
/// toward the centre.
struct OrderKey {
  int alpha = 0;
  int beta = 0;

  friend bool operator<(const OrderKey& a, const OrderKey& b) {
    if (a.alpha + a.beta != b.alpha + b.beta) return a.alpha + a.beta < b.alpha + b.beta;
    return a.beta < b.beta;
  }
  friend bool operator==(const OrderKey& a, const OrderKey& b) {
    return a.alpha == b.alpha && a.beta == b.beta;
  }
};

/// Fixed (h_j, eta_j) device parameters, innermost-first: h strictly
/// decreasing along the list.
struct DeviceParams {
  std::vector<int> h;
  std::vector<double> eta;

  int count() const { return static_cast<int>(h.size()); }
  DeviceSet with(int cut_k, const Eigen::VectorXd& eps) const;
};

struct SelectorConfig {
  std::vector<double> eta_grid{0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01};
  long long h_budget = 1 << 20;
  /// Accept when |det A| >= det_fraction * |lead column entry * its minor|.
  double det_fraction = 0.5;
  /// Floor for the outermost device index; 0 picks the first index whose
  /// window lies inside the phase domain.
  int h_min = 0;
};

struct SelectionDiagnostics {
  int iota_coordinate = 0;        ///< row owning the dominant entry
  double abs_det = 0.0;           ///< |det A| at the accepted parameters
  double lead = 0.0;              ///< |a_{iota, first} * minor_{iota}|
  std::vector<double> dominance;  ///< |a_i * minor_i| / (eps0 * lead) per other row
  long long attempts = 0;
  std::string message;
};

struct SelectionResult {
  bool success = false;
  DeviceParams params;
  SelectionDiagnostics diag;
};

/// Constructive parameter search mirroring the inductive nonsingularity
/// argument: the inner subsystem (all rows except the minimal one) is solved
/// first; the outer level then walks the eta grid downward and doubles h
/// until every competing row is dominated and the determinant certificate
/// holds, or the h budget runs out.
SelectionResult select_device_params(const Spiral& s, const StratifiedModel& m,
                                     const SelectorConfig& sel = {},
                                     const QuadratureConfig& cfg = {});

/// b_i: full-turn moment of the layer monomial over the cut window plus the
/// remainder integral.
Eigen::VectorXd assemble_rhs(const Spiral& s, const StratifiedModel& m, int k,
                             const QuadratureConfig& cfg = {});

/// The endpoint map f(eps) and its Jacobian. Monomial moments over the device
/// windows are cached at construction, so repeated evaluations only pay for
/// remainder quadratures.
///
/// f_i(eps) = sum_j [ increment of the layer monomial under the j-th shift
///                    - remainder difference integral over window j ],
/// so f(0) = 0 identically and the endpoint equations read f(eps) = b.
class EndpointSystem {
 public:
  EndpointSystem(Spiral s, StratifiedModel m, int k, DeviceParams params,
                 QuadratureConfig cfg = {});

  int size() const { return params_.count(); }
  int cut_index() const { return k_; }
  const Spiral& spiral() const { return spiral_; }
  const StratifiedModel& model() const { return model_; }
  const DeviceParams& params() const { return params_; }
  const Eigen::VectorXd& rhs() const { return b_; }
  /// Admissible box: |eps_j| must stay below t_{h_j eta_j}.
  const Eigen::VectorXd& device_box() const { return box_; }

  Eigen::VectorXd f(const Eigen::VectorXd& eps) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& eps) const;
  /// (alpha_i + 1) I^{alpha_i - 1, beta_i} over window j plus the derivative
  /// of the remainder difference; equals jacobian(0).
  Eigen::MatrixXd jacobian_at_zero() const;

 private:
  double remainder_difference(int coordinate, int j, double eps) const;
  double remainder_derivative(int coordinate, int j, double eps) const;

  Spiral spiral_;
  StratifiedModel model_;
  int k_;
  DeviceParams params_;
  QuadratureConfig quad_;
  Eigen::VectorXd b_;
  Eigen::VectorXd box_;
  std::vector<std::vector<std::vector<double>>> moments_;  // [row][device][order]
};

Eigen::VectorXd assemble_f(const Spiral& s, const StratifiedModel& m, const DeviceParams& params,
                           const Eigen::VectorXd& eps, const QuadratureConfig& cfg = {});
Eigen::MatrixXd jacobian_at_zero(const Spiral& s, const StratifiedModel& m,
                                 const DeviceParams& params, const QuadratureConfig& cfg = {});

struct SolverReport {
  Eigen::VectorXd eps;
  double residual_norm = 0.0;
  int iterations = 0;
  double abs_det = 0.0;  ///< |det| of the Jacobian at zero
  std::vector<double> residual_history;
  double bound_ratio = 0.0;  ///< |eps| / sum_i |b_i|, 0 when b = 0
  bool converged = false;
  std::string failure;
};

/// Damped Newton from eps = 0 with steps clamped into the admissible box.
/// Affine systems (all layer alphas zero) finish in one iteration; b = 0
/// returns eps = 0 without iterating.
SolverReport newton_solve(const EndpointSystem& system, double tol = 1e-12, int max_iter = 50);

struct BibaRow {
  int k = 0;
  double eps_norm = 0.0;
  double b_sum = 0.0;
  double ratio = 0.0;        ///< |eps| / sum |b_i|
  double viola = 0.0;        ///< integral of t^2 |phi_dot| over the cut window
  double viola_ratio = 0.0;  ///< |eps| / viola
  bool converged = false;
};

struct BibaReport {
  std::vector<BibaRow> rows;
  double max_ratio = 0.0;
  double c3 = 0.0;  ///< measured sweep constant for the viola bound

  /// True when no ratio grows past `factor` times the running max over the
  /// first three sweep entries.
  bool bounded(double factor = 1.05) const;
};

/// Sweeps k with fixed device parameters and reports the solution-size
/// ratios |eps| / sum |b_i| and |eps| / integral t^2 |phi_dot|.
BibaReport verify_biba(const Spiral& s, const StratifiedModel& m, const DeviceParams& params,
                       const std::vector<int>& ks, double tol = 1e-12, int max_iter = 50,
                       const QuadratureConfig& cfg = {});

}  // namespace spirallab
