#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spirallab/model.hpp"
#include "spirallab/phase.hpp"
#include "spirallab/quadrature.hpp"
#include "spirallab/solver.hpp"

namespace spirallab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment description parsed from a plain key = value text file.
/// Repeated `model.layer` / `model.remainder` keys accumulate. Lines starting
/// with '#' (or trailing '#' comments) are ignored. Defaults below are the
/// shipped physical defaults; anything not listed in the file keeps them.
struct ExperimentConfig {
  // model
  int n = 0;
  std::vector<int> weights;
  std::vector<MonomialLayer> layers;
  std::vector<std::pair<int, std::vector<RemainderTerm>>> remainders;

  // phase
  std::string phase_family;  // power | log-power | scaled-double-log
  double phase_a = 0.5;      // power exponent
  double phase_q = 2.0;      // log-power exponent
  double phase_m = 50.0;     // double-log scale
  double phase_t = -1.0;     // domain end; < 0 keeps the family default

  // quadrature: the pipeline solves across windows whose natural scale decays
  // fast with k, so the default runs in relative mode.
  QuadratureConfig quad = QuadratureConfig::relative(1e-12);

  // solver
  double solver_tol = 1e-12;
  int solver_max_iter = 50;
  SelectorConfig selector;

  // scan
  int k_min = 0;
  int k_max = -1;
  bool full_scan = false;
  double endpoint_tol = 1e-9;

  // output
  std::string output_dir = "out";
  int curve_samples = 400;

  StratifiedModel build_model() const;
  Phase build_phase() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace spirallab
