#include "spirallab/config.hpp"

#include <fstream>
#include <sstream>

namespace spirallab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const std::string& key, std::vector<std::string>& errs) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    errs.push_back("bad number for " + key + ": '" + s + "'");
    return 0.0;
  }
}

long long to_int(const std::string& s, const std::string& key, std::vector<std::string>& errs) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    errs.push_back("bad integer for " + key + ": '" + s + "'");
    return 0;
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> errs;

  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto fields = split_ws(value);

    if (key == "model.n") {
      cfg.n = static_cast<int>(to_int(value, key, errs));
    } else if (key == "model.weights") {
      cfg.weights.clear();
      for (const auto& f : fields) cfg.weights.push_back(static_cast<int>(to_int(f, key, errs)));
    } else if (key == "model.layer") {
      if (fields.size() != 3) {
        errs.push_back(key + ": expected 'coordinate alpha beta'");
      } else {
        cfg.layers.push_back({static_cast<int>(to_int(fields[0], key, errs)),
                              static_cast<int>(to_int(fields[1], key, errs)),
                              static_cast<int>(to_int(fields[2], key, errs))});
      }
    } else if (key == "model.remainder") {
      if (fields.size() != 4) {
        errs.push_back(key + ": expected 'coordinate coeff pow_x1 pow_x2'");
      } else {
        const int coord = static_cast<int>(to_int(fields[0], key, errs));
        const RemainderTerm term{to_double(fields[1], key, errs),
                                 static_cast<int>(to_int(fields[2], key, errs)),
                                 static_cast<int>(to_int(fields[3], key, errs))};
        cfg.remainders.push_back({coord, {term}});
      }
    } else if (key == "phase.family") {
      cfg.phase_family = value;
    } else if (key == "phase.a") {
      cfg.phase_a = to_double(value, key, errs);
    } else if (key == "phase.q") {
      cfg.phase_q = to_double(value, key, errs);
    } else if (key == "phase.M") {
      cfg.phase_m = to_double(value, key, errs);
    } else if (key == "phase.T") {
      cfg.phase_t = to_double(value, key, errs);
    } else if (key == "quad.abs_tol") {
      cfg.quad.abs_tol = to_double(value, key, errs);
    } else if (key == "quad.rel_tol") {
      cfg.quad.rel_tol = to_double(value, key, errs);
    } else if (key == "quad.max_depth") {
      cfg.quad.max_depth = static_cast<int>(to_int(value, key, errs));
    } else if (key == "solver.tol") {
      cfg.solver_tol = to_double(value, key, errs);
    } else if (key == "solver.max_iter") {
      cfg.solver_max_iter = static_cast<int>(to_int(value, key, errs));
    } else if (key == "solver.h_budget") {
      cfg.selector.h_budget = to_int(value, key, errs);
    } else if (key == "solver.eta_grid") {
      cfg.selector.eta_grid.clear();
      for (const auto& f : fields) cfg.selector.eta_grid.push_back(to_double(f, key, errs));
    } else if (key == "solver.det_fraction") {
      cfg.selector.det_fraction = to_double(value, key, errs);
    } else if (key == "solver.h_min") {
      cfg.selector.h_min = static_cast<int>(to_int(value, key, errs));
    } else if (key == "scan.k_min") {
      cfg.k_min = static_cast<int>(to_int(value, key, errs));
    } else if (key == "scan.k_max") {
      cfg.k_max = static_cast<int>(to_int(value, key, errs));
    } else if (key == "scan.full") {
      if (value == "true" || value == "1")
        cfg.full_scan = true;
      else if (value == "false" || value == "0")
        cfg.full_scan = false;
      else
        errs.push_back("scan.full: expected true/false");
    } else if (key == "endpoint.tol") {
      cfg.endpoint_tol = to_double(value, key, errs);
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "output.curve_samples") {
      cfg.curve_samples = static_cast<int>(to_int(value, key, errs));
    } else {
      errs.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (cfg.n < 3) errs.push_back("model.n must be >= 3");
  if (static_cast<int>(cfg.weights.size()) != cfg.n)
    errs.push_back("model.weights must list exactly n entries");
  if (static_cast<int>(cfg.layers.size()) != cfg.n - 2)
    errs.push_back("model.layer: expected one entry per coordinate 3..n");
  if (cfg.phase_family != "power" && cfg.phase_family != "log-power" &&
      cfg.phase_family != "scaled-double-log")
    errs.push_back("phase.family must be power | log-power | scaled-double-log");
  if (cfg.k_min < 1) errs.push_back("scan.k_min must be a positive integer");

  if (!errs.empty()) {
    std::string msg = "config errors:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

StratifiedModel ExperimentConfig::build_model() const {
  return StratifiedModel(weights, layers, remainders);
}

Phase ExperimentConfig::build_phase() const {
  if (phase_family == "power")
    return phase_t > 0 ? Phase::power(phase_a, phase_t) : Phase::power(phase_a);
  if (phase_family == "log-power")
    return phase_t > 0 ? Phase::log_power(phase_q, phase_t) : Phase::log_power(phase_q);
  if (phase_family == "scaled-double-log")
    return phase_t > 0 ? Phase::scaled_double_log(phase_m, phase_t)
                       : Phase::scaled_double_log(phase_m);
  throw ConfigError("unknown phase family: " + phase_family);
}

}  // namespace spirallab
