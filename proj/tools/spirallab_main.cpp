#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spirallab/lab.hpp"
#include "spirallab/selftest.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const spirallab::ExperimentConfig cfg = spirallab::load_config(config_path);
  const spirallab::RunReport report = spirallab::run_pipeline(cfg);
  const std::string dir = spirallab::emit_outputs(report, cfg);
  std::cout << spirallab::summary_text(report, cfg);
  std::cout << "outputs = " << dir << "\n";
  return report.summary.found ? 0 : 1;
}

int cmd_validate(const std::string& config_path) {
  const spirallab::ExperimentConfig cfg = spirallab::load_config(config_path);
  const spirallab::StratifiedModel model = cfg.build_model();
  const spirallab::ModelValidation mv = spirallab::validate_model(model);
  if (mv.ok()) {
    std::cout << "model: ok (n = " << model.dimension() << ")\n";
  } else {
    std::cout << "model: " << mv.violations.size() << " violation(s)\n";
    for (const auto& v : mv.violations)
      std::cout << "  coordinate " << v.coordinate << ": " << v.message << "\n";
  }
  const spirallab::Phase phase = cfg.build_phase();
  const spirallab::PhaseDiagnostics pd = spirallab::diagnose_phase(phase);
  std::cout << "phase: family " << cfg.phase_family << ", domain end " << phase.domain_end()
            << "\n";
  std::cout << "  monotone_decreasing = " << (pd.monotone_decreasing ? "true" : "false") << "\n";
  std::cout << "  phi_dot_negative = " << (pd.phi_dot_negative ? "true" : "false") << "\n";
  std::cout << "  phi_span = " << pd.phi_span << "\n";
  std::cout << "  phi_dot_growth = " << pd.phi_dot_ratio << "\n";
  std::cout << "  sup_t_phi_dot = " << pd.sup_t_phi_dot << "\n";
  return mv.ok() && pd.monotone_decreasing ? 0 : 1;
}

int cmd_selftest() {
  using spirallab::Phase;
  using spirallab::SelftestReport;
  const spirallab::Spiral spiral{Phase::power(0.5)};

  const SelftestReport ibp = spirallab::moment_identity_selftest(spiral, 0x5eedd00dULL, 200);
  std::cout << (ibp.pass ? "PASS" : "FAIL") << " moment identity: " << ibp.cases << " cases, "
            << ibp.failures << " failures (" << ibp.detail << ")\n";

  const SelftestReport inc =
      spirallab::translation_increment_selftest(spiral, 0x0ddba11ULL, 100);
  std::cout << (inc.pass ? "PASS" : "FAIL") << " translation increment: " << inc.cases
            << " cases, " << inc.failures << " failures (" << inc.detail << ")\n";

  const SelftestReport ratio = spirallab::ratio_bounds_selftest(spiral, 0xbead5ULL, 24);
  std::cout << (ratio.pass ? "PASS" : "FAIL") << " moment/weight ratio bounds: " << ratio.cases
            << " cases, " << ratio.failures << " failures (" << ratio.detail << ")\n";

  return ibp.pass && inc.pass && ratio.pass ? 0 : 1;
}

int cmd_dump_curves(const std::string& config_path, int k) {
  const spirallab::ExperimentConfig cfg = spirallab::load_config(config_path);
  const auto [original, modified] = spirallab::dump_curves(cfg, k);

  namespace fs = std::filesystem;
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("SPIRALLAB_OUTPUT_DIR"); env != nullptr && *env != '\0')
    dir = env;
  fs::create_directories(dir);
  const std::string tag = std::to_string(k);
  std::ofstream(fs::path(dir) / ("curves_original_k" + tag + ".tsv")) << original;
  std::ofstream(fs::path(dir) / ("curves_modified_k" + tag + ".tsv")) << modified;
  std::cout << "wrote curves for k = " << k << " to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spirallab: shorter competitors for horizontal spirals in rank-2 models"};
  app.require_subcommand(1);

  std::string config_path;
  int k = 0;

  CLI::App* run = app.add_subcommand("run", "run the full pipeline for a config");
  run->add_option("config", config_path, "experiment config file")->required();

  CLI::App* validate = app.add_subcommand("validate", "validate the model and phase of a config");
  validate->add_option("config", config_path, "experiment config file")->required();

  app.add_subcommand("calculus-selftest",
                     "seeded identity / increment / ratio-bound suites on the power spiral");

  CLI::App* dump = app.add_subcommand("dump-curves", "emit polylines for one cut index");
  dump->add_option("config", config_path, "experiment config file")->required();
  dump->add_option("--k", k, "cut index")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (validate->parsed()) return cmd_validate(config_path);
    if (app.get_subcommand("calculus-selftest")->parsed()) return cmd_selftest();
    if (dump->parsed()) return cmd_dump_curves(config_path, k);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
