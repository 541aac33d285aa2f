#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "spirallab/config.hpp"
#include "spirallab/solver.hpp"
#include "spirallab/surgery.hpp"

namespace spirallab {

/// The cut window split by the size of t * phi_dot: the "fast" part where
/// |t phi_dot| >= 1 and the complementary "slow" part. The split carries the
/// two pointwise inequalities
///   x^2/(sqrt(1+x^2)+1) >= x/3    for x >= 1,
///   x^2/(sqrt(1+x^2)+1) >= x^2/3  for x <= 1,
/// which drive the eventual positivity of the length gain.
struct SplitDiagnostics {
  // index 0: fast part (|t phi_dot| >= 1), index 1: slow part
  double measure[2] = {0, 0};
  double excess[2] = {0, 0};     ///< integral of t^2 phi_dot^2 / (sqrt(1+..)+1)
  double t_phid[2] = {0, 0};     ///< integral of t |phi_dot|
  double t2_phid[2] = {0, 0};    ///< integral of t^2 |phi_dot|
  double t2_phid2[2] = {0, 0};   ///< integral of t^2 phi_dot^2
  double fast_ratio = 0.0;       ///< excess_fast / t_phid_fast (>= 1/3 when nonempty)
  double slow_ratio = 0.0;       ///< excess_slow / t2_phid2_slow (>= 1/3 when nonempty)
};

SplitDiagnostics split_diagnostics(const Spiral& s, int k, const QuadratureConfig& cfg = {});

struct KRecord {
  int k = 0;
  bool success = false;
  bool certified = false;
  std::string failure;
  double t_k = 0.0;
  double b_sum = 0.0;     ///< sum |b_i|
  double eps_norm = 0.0;  ///< |eps|
  double residual = 0.0;
  double endpoint_err = 0.0;  ///< |E| after re-lifting with the solved eps
  double delta_l = 0.0;
  double wall_ms = 0.0;
  double viola = 0.0;  ///< integral of t^2 |phi_dot| over the cut window
  Eigen::VectorXd b;
  Eigen::VectorXd eps;
  SplitDiagnostics split;
};

struct RunSummary {
  bool found = false;
  int k_star = 0;
  double delta_l_star = 0.0;
  double endpoint_err_star = 0.0;
  /// Gain minus the endpoint mismatch, so the certificate carries its own
  /// numerical slack.
  double delta_l_minus_err = 0.0;
  double biba_max_ratio = 0.0;
  double biba_c3 = 0.0;
  int k_min_effective = 0;
  std::string note;
};

struct RunReport {
  SelectionResult selection;
  std::vector<KRecord> records;
  RunSummary summary;
};

/// Full pipeline: validate the model, fix device parameters, then scan k
/// ascending. Per-k work: assemble the endpoint system, solve, re-lift both
/// curves to confirm the endpoint match, and account the length gain. The
/// scan stops at the first certified k unless the config asks for all of
/// them. Per-k failures are recorded and the scan continues; configuration
/// errors abort by throwing ConfigError.
RunReport run_pipeline(const ExperimentConfig& cfg);

/// Certificate for one k: endpoint error within tolerance, positive gain,
/// solver converged inside the admissible box.
bool record_certified(const KRecord& r);

/// Deterministic per-k table (tab separated, pinned column set). Wall time is
/// the one genuinely non-reproducible column.
std::string per_k_table(const RunReport& report);
std::string summary_text(const RunReport& report, const ExperimentConfig& cfg);

/// Sampled polyline of the original or modified planar curve, one block per
/// labelled interval so jumps stay visible. Columns: t, x1, x2.
std::string polyline_text(const Spiral& s, double t_lo, double t_hi, int samples);
std::string polyline_text(const ModifiedPath& path, int samples);

/// Writes summary.txt, per_k.tsv, the two polyline files for the certifying
/// k (when found) and a regression fixture file into the output directory.
/// The directory may be overridden with SPIRALLAB_OUTPUT_DIR. Returns the
/// directory used. Unwritable directories abort only the emission.
std::string emit_outputs(const RunReport& report, const ExperimentConfig& cfg);

/// Solves at one specific k and returns the two polylines (original first).
std::pair<std::string, std::string> dump_curves(const ExperimentConfig& cfg, int k);

}  // namespace spirallab
