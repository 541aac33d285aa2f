#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace spirallab {

/// One graded coordinate i >= 3: its leading coefficient is the monomial
/// x1^(alpha+1) * x2^beta, of homogeneous degree alpha + beta + 1 = w_i - 1.
struct MonomialLayer {
  int coordinate = 0;  ///< index i in 3..n
  int alpha = 0;
  int beta = 0;
};

/// One term c * x1^a1 * x2^a2 of a higher-order remainder r_i(x1, x2).
struct RemainderTerm {
  double coeff = 0.0;
  int pow_x1 = 0;
  int pow_x2 = 0;
};

struct ModelViolation {
  int coordinate = 0;  ///< offending index, 0 when global
  std::string message;
};

struct ModelValidation {
  std::vector<ModelViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Rank-2 stratified model in exponential coordinates of the second type.
///
/// The first vector field is d/dx1; the second is
///   d/dx2 + sum_i a_i(x1, x2) d/dx_i,   a_i = p_i + r_i,
/// with p_i the layer monomial and r_i a finite polynomial of homogeneous
/// degree >= w_i. Coefficients depend on (x1, x2) only; the API does not even
/// accept the remaining coordinates, which makes that restriction structural.
///
/// Values are immutable after construction and all operations are pure.
class StratifiedModel {
 public:
  /// Basic shape checks happen here (sizes consistent, one layer per
  /// coordinate 3..n, exponents within range); everything that can be wrong
  /// in a meaningful way is left to validate_model so that defective models
  /// can be constructed and diagnosed.
  StratifiedModel(std::vector<int> weights, std::vector<MonomialLayer> layers,
                  std::vector<std::pair<int, std::vector<RemainderTerm>>> remainders = {});

  static StratifiedModel heisenberg();
  /// n = 4, weights (1,1,2,3), layers (0,0) and (1,0).
  static StratifiedModel engel();

  int dimension() const { return static_cast<int>(weights_.size()); }
  const std::vector<int>& weights() const { return weights_; }
  int weight(int coordinate) const;

  const MonomialLayer& layer(int coordinate) const;
  const std::vector<MonomialLayer>& layers() const { return layers_; }
  const std::vector<RemainderTerm>& remainder(int coordinate) const;
  bool has_remainders() const;

  /// p_i(x1, x2)
  double monomial(int coordinate, double x1, double x2) const;
  /// r_i(x1, x2)
  double remainder_value(int coordinate, double x1, double x2) const;
  /// r_i(x1, x2) - r_i(x1 + eps, x2) in expanded binomial form. The naive
  /// difference cancels catastrophically once eps is small against x1; the
  /// expansion stays well conditioned for every eps.
  double remainder_shift_difference(int coordinate, double x1, double x2, double eps) const;
  /// d r_i / d x1
  double remainder_d1(int coordinate, double x1, double x2) const;
  /// a_i = p_i + r_i
  double coefficient(int coordinate, double x1, double x2) const;

 private:
  void check_coordinate(int coordinate) const;

  std::vector<int> weights_;
  std::vector<MonomialLayer> layers_;                  // indexed by coordinate - 3
  std::vector<std::vector<RemainderTerm>> remainders_; // indexed by coordinate - 3
};

/// Checks every model invariant and reports all violations; never aborts and
/// has no side effects, so it is idempotent by construction.
ModelValidation validate_model(const StratifiedModel& m);

/// |x1|^(1/w1) + ... + |xn|^(1/wn); homogeneous of degree 1 under dilations.
double pseudo_norm(const StratifiedModel& m, const Eigen::VectorXd& x);

/// (lambda^{w_1} x_1, ..., lambda^{w_n} x_n); rejects lambda <= 0.
Eigen::VectorXd dilate(const StratifiedModel& m, double lambda, const Eigen::VectorXd& x);

/// Max relative residual of p_i(delta_lambda x) - lambda^{w_i - 1} p_i(x)
/// over the given planar samples and scale factors. Zero up to roundoff for
/// pure monomial layers.
double check_homogeneity(const StratifiedModel& m, int coordinate,
                         const std::vector<Eigen::Vector2d>& samples,
                         const std::vector<double>& lambdas);

/// Empirical constant sup |r_i(x)| / pseudo_norm(x)^{w_i} over a planar grid
/// with 0 < pseudo_norm <= 1. Diagnostic only.
double remainder_bound_constant(const StratifiedModel& m, int coordinate, int grid = 81);

}  // namespace spirallab
