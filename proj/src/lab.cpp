#include "spirallab/lab.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spirallab/numeric.hpp"

namespace spirallab {

namespace {

/// Shortest round-trip decimal form; locale independent, so emitted tables
/// are byte-reproducible.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double speed_excess(const Phase& phase, double t) {
  const double x = t * phase.phi_dot(t);
  return x * x / (std::sqrt(1.0 + x * x) + 1.0);
}

}  // namespace

SplitDiagnostics split_diagnostics(const Spiral& s, int k, const QuadratureConfig& cfg) {
  const Phase& phase = s.phase();
  const double lo = s.t_k(k + 1);
  const double hi = s.t_k(k);
  const auto indicator = [&phase](double t) { return std::abs(t * phase.phi_dot(t)) - 1.0; };

  // Locate sign changes of |t phi_dot| - 1 on a fixed grid, refine each
  // crossing by bisection, then classify the resulting pieces.
  constexpr int kGrid = 64;
  std::vector<double> cuts{lo};
  double prev_t = lo;
  double prev_g = indicator(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double t = lo + (hi - lo) * i / kGrid;
    const double g = indicator(t);
    if ((prev_g < 0.0) != (g < 0.0)) {
      double a = prev_t, b = t;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        if ((indicator(a) < 0.0) != (indicator(m) < 0.0))
          b = m;
        else
          a = m;
      }
      cuts.push_back(0.5 * (a + b));
    }
    prev_t = t;
    prev_g = g;
  }
  cuts.push_back(hi);

  SplitDiagnostics d;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const int side = indicator(0.5 * (a + b)) >= 0.0 ? 0 : 1;
    d.measure[side] += b - a;
    d.excess[side] += integrate([&](double t) { return speed_excess(phase, t); }, a, b, cfg).value;
    d.t_phid[side] +=
        integrate([&](double t) { return t * std::abs(phase.phi_dot(t)); }, a, b, cfg).value;
    d.t2_phid[side] +=
        integrate([&](double t) { return t * t * std::abs(phase.phi_dot(t)); }, a, b, cfg).value;
    d.t2_phid2[side] +=
        integrate([&](double t) { return t * t * phase.phi_dot(t) * phase.phi_dot(t); }, a, b, cfg)
            .value;
  }
  if (d.t_phid[0] > 0.0) d.fast_ratio = d.excess[0] / d.t_phid[0];
  if (d.t2_phid2[1] > 0.0) d.slow_ratio = d.excess[1] / d.t2_phid2[1];
  return d;
}

bool record_certified(const KRecord& r) { return r.success && r.certified; }

RunReport run_pipeline(const ExperimentConfig& cfg) {
  RunReport rep;

  const StratifiedModel model = cfg.build_model();
  if (const ModelValidation mv = validate_model(model); !mv.ok()) {
    std::string msg = "model validation failed:";
    for (const auto& v : mv.violations)
      msg += "\n  - coordinate " + std::to_string(v.coordinate) + ": " + v.message;
    throw ConfigError(msg);
  }
  const Spiral spiral{cfg.build_phase()};

  rep.selection = select_device_params(spiral, model, cfg.selector, cfg.quad);
  if (!rep.selection.success) {
    rep.summary.note = "device parameter selection failed: " + rep.selection.diag.message;
    return rep;
  }
  const DeviceParams& params = rep.selection.params;

  const int k_lo = std::max(cfg.k_min, params.h.front() + 1);
  rep.summary.k_min_effective = k_lo;
  if (k_lo != cfg.k_min)
    rep.summary.note = "scan start raised to k = " + std::to_string(k_lo) +
                       " so the cut stays inside the device ladder";

  for (int k = k_lo; k <= cfg.k_max; ++k) {
    KRecord r;
    r.k = k;
    const auto tic = std::chrono::steady_clock::now();
    try {
      r.t_k = spiral.t_k(k);
      if (!(spiral.t_k(k + 1) > 1e-290))
        throw std::runtime_error("cut window underflows double precision");

      EndpointSystem system(spiral, model, k, params, cfg.quad);
      const SolverReport sol = newton_solve(system, cfg.solver_tol, cfg.solver_max_iter);
      r.b = system.rhs();
      r.b_sum = r.b.cwiseAbs().sum();
      r.eps = sol.eps;
      r.eps_norm = sol.eps.norm();
      r.residual = sol.residual_norm;
      if (!sol.converged) throw std::runtime_error("newton solve failed: " + sol.failure);

      const ModifiedPath path(spiral, params.with(k, sol.eps));
      const EndpointError err = endpoint_error_direct(path, model, cfg.quad);
      r.endpoint_err = err.error.norm();
      const LengthGain gain = length_gain(path, cfg.quad);
      r.delta_l = gain.gain;
      r.split = split_diagnostics(spiral, k, cfg.quad);
      r.viola = integrate(
                    [&](double t) { return t * t * std::abs(spiral.phase().phi_dot(t)); },
                    spiral.t_k(k + 1), spiral.t_k(k), cfg.quad)
                    .value;
      r.success = true;
      r.certified = r.endpoint_err <= cfg.endpoint_tol * err.scale && r.delta_l > 0.0;
    } catch (const std::exception& e) {
      r.failure = e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic)
                    .count();
    rep.records.push_back(std::move(r));
    if (rep.records.back().certified && !cfg.full_scan) break;
  }

  for (const KRecord& r : rep.records) {
    if (record_certified(r) && !rep.summary.found) {
      rep.summary.found = true;
      rep.summary.k_star = r.k;
      rep.summary.delta_l_star = r.delta_l;
      rep.summary.endpoint_err_star = r.endpoint_err;
      rep.summary.delta_l_minus_err = r.delta_l - r.endpoint_err;
    }
    if (r.success && r.b_sum > 0.0)
      rep.summary.biba_max_ratio = std::max(rep.summary.biba_max_ratio, r.eps_norm / r.b_sum);
    if (r.success && r.viola > 0.0)
      rep.summary.biba_c3 = std::max(rep.summary.biba_c3, r.eps_norm / r.viola);
  }
  return rep;
}

std::string per_k_table(const RunReport& report) {
  std::string out = "k\tt_k\tnorm_b\tnorm_eps\tresidual\tendpoint_err\tdelta_L\twall_ms\n";
  for (const KRecord& r : report.records) {
    out += std::to_string(r.k);
    out += '\t';
    out += fmt(r.t_k);
    out += '\t';
    out += fmt(r.b_sum);
    out += '\t';
    out += fmt(r.eps_norm);
    out += '\t';
    out += fmt(r.residual);
    out += '\t';
    out += fmt(r.endpoint_err);
    out += '\t';
    out += fmt(r.delta_l);
    out += '\t';
    out += fmt(r.wall_ms);
    out += '\n';
  }
  return out;
}

std::string summary_text(const RunReport& report, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "found = " << (report.summary.found ? "true" : "false") << "\n";
  if (report.summary.found) {
    os << "k_star = " << report.summary.k_star << "\n";
    os << "delta_L = " << fmt(report.summary.delta_l_star) << "\n";
    os << "endpoint_err = " << fmt(report.summary.endpoint_err_star) << "\n";
    os << "delta_L_minus_err = " << fmt(report.summary.delta_l_minus_err) << "\n";
  }
  os << "k_min_effective = " << report.summary.k_min_effective << "\n";
  os << "k_max = " << cfg.k_max << "\n";
  os << "records = " << report.records.size() << "\n";
  if (report.selection.success) {
    os << "device_h =";
    for (int h : report.selection.params.h) os << " " << h;
    os << "\ndevice_eta =";
    for (double e : report.selection.params.eta) os << " " << fmt(e);
    os << "\nselector_iota = " << report.selection.diag.iota_coordinate << "\n";
    os << "selector_abs_det = " << fmt(report.selection.diag.abs_det) << "\n";
    os << "selector_lead = " << fmt(report.selection.diag.lead) << "\n";
    os << "selector_attempts = " << report.selection.diag.attempts << "\n";
  }
  os << "biba_max_ratio = " << fmt(report.summary.biba_max_ratio) << "\n";
  os << "biba_c3 = " << fmt(report.summary.biba_c3) << "\n";
  if (!report.summary.note.empty()) os << "note = " << report.summary.note << "\n";
  for (const KRecord& r : report.records)
    if (!r.success) os << "failure_k_" << r.k << " = " << r.failure << "\n";
  for (const KRecord& r : report.records) {
    if (!record_certified(r) || r.k != report.summary.k_star) continue;
    os << "split_fast_measure = " << fmt(r.split.measure[0]) << "\n";
    os << "split_slow_measure = " << fmt(r.split.measure[1]) << "\n";
    os << "split_fast_ratio = " << fmt(r.split.fast_ratio) << "\n";
    os << "split_slow_ratio = " << fmt(r.split.slow_ratio) << "\n";
  }
  return os.str();
}

std::string polyline_text(const Spiral& s, double t_lo, double t_hi, int samples) {
  std::string out = "# curve original\n# columns t x1 x2\n";
  for (int i = 0; i <= samples; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / samples;
    const Eigen::Vector2d p = s.kappa(t);
    out += fmt(t);
    out += '\t';
    out += fmt(p[0]);
    out += '\t';
    out += fmt(p[1]);
    out += '\n';
  }
  return out;
}

std::string polyline_text(const ModifiedPath& path, int samples) {
  std::string out = "# curve modified\n# columns t x1 x2\n";
  const auto& marked = path.intervals();
  for (std::size_t i = 0; i < marked.size(); ++i) {
    out += "# interval " + marked[i].label + " " + fmt(marked[i].t0) + " " + fmt(marked[i].t1) +
           "\n";
    if (i + 1 < marked.size())
      out += "# interval A_" + std::to_string(3 + i) + " " + fmt(marked[i].t1) + " " +
             fmt(marked[i + 1].t0) + "\n";
  }
  const double t_lo = path.modified_start();
  const double t_hi = path.final_time();
  for (int i = 0; i <= samples; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / samples;
    const Eigen::Vector2d p = path.point(t);
    out += fmt(t);
    out += '\t';
    out += fmt(p[0]);
    out += '\t';
    out += fmt(p[1]);
    out += '\n';
  }
  return out;
}

std::string emit_outputs(const RunReport& report, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("SPIRALLAB_OUTPUT_DIR"); env != nullptr && *env != '\0')
    dir = env;

  std::error_code ec;
  fs::create_directories(dir, ec);
  const auto write = [&dir](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + name);
    out << body;
  };

  write("summary.txt", summary_text(report, cfg));
  write("per_k.tsv", per_k_table(report));

  if (report.summary.found) {
    const Spiral spiral{cfg.build_phase()};
    const KRecord* star = nullptr;
    for (const KRecord& r : report.records)
      if (r.k == report.summary.k_star) star = &r;
    if (star != nullptr) {
      const ModifiedPath path(spiral, report.selection.params.with(star->k, star->eps));
      const std::string tag = std::to_string(star->k);
      write("curves_original_k" + tag + ".tsv",
            polyline_text(spiral, path.modified_start(), path.final_time(), cfg.curve_samples));
      write("curves_modified_k" + tag + ".tsv", polyline_text(path, cfg.curve_samples));

      std::string fixture;
      fixture += "k_star = " + tag + "\n";
      fixture += "delta_L = " + fmt(star->delta_l) + "\n";
      fixture += "endpoint_err = " + fmt(star->endpoint_err) + "\n";
      fixture += "eps =";
      for (int j = 0; j < star->eps.size(); ++j) fixture += " " + fmt(star->eps[j]);
      fixture += "\nh =";
      for (int h : report.selection.params.h) fixture += " " + std::to_string(h);
      fixture += "\neta =";
      for (double e : report.selection.params.eta) fixture += " " + fmt(e);
      fixture += "\n";
      write("fixture.txt", fixture);
    }
  }
  return dir;
}

std::pair<std::string, std::string> dump_curves(const ExperimentConfig& cfg, int k) {
  const StratifiedModel model = cfg.build_model();
  const Spiral spiral{cfg.build_phase()};
  const SelectionResult sel = select_device_params(spiral, model, cfg.selector, cfg.quad);
  if (!sel.success)
    throw ConfigError("device parameter selection failed: " + sel.diag.message);
  if (k <= sel.params.h.front())
    throw ConfigError("k must exceed the innermost device index " +
                      std::to_string(sel.params.h.front()));
  EndpointSystem system(spiral, model, k, sel.params, cfg.quad);
  const SolverReport sol = newton_solve(system, cfg.solver_tol, cfg.solver_max_iter);
  if (!sol.converged) throw ConfigError("newton solve failed: " + sol.failure);
  const ModifiedPath path(spiral, sel.params.with(k, sol.eps));
  return {polyline_text(spiral, path.modified_start(), path.final_time(), cfg.curve_samples),
          polyline_text(path, cfg.curve_samples)};
}

}  // namespace spirallab
