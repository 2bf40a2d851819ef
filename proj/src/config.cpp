#include "phi4/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "phi4/error.hpp"
#include "phi4/potential.hpp"

namespace phi4 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ConfigError(key, "expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(key, "integer out of range: '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

}  // namespace

double EllSpec::resolve(double beta, double lbar) const {
  switch (mode) {
    case EllMode::absolute:
      return value;
    case EllMode::fraction:
      return value * lbar;
    case EllMode::exponential:
      return std::exp(value * beta);
  }
  return value;
}

double ExperimentConfig::tol(const std::string& key) const {
  const auto it = tolerance.find(key);
  if (it == tolerance.end()) throw ConfigError("tolerance." + key, "no such tolerance");
  return it->second;
}

double ExperimentConfig::spectral_spacing(double beta) const {
  if (grid_h > 0.0) return grid_h;
  return beta < 8.0 ? 0.004 : 0.002;
}

double ExperimentConfig::time_step(double beta) const {
  if (dt > 0.0) return dt;
  return beta < 8.0 ? 0.005 : 0.002;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "gap-scan",          "semiclassical-report", "riccati",
      "hitting-time",      "first-transition",     "count-subcritical",
      "poisson-supercritical", "ldp-rate",         "sampler-crosscheck"};
  return names;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  auto& t = c.tolerance;
  if (experiment == "gap-scan") {
    c.betas = {4, 6, 8, 10};
    t = {{"gap_ratio", 0.2}};
  } else if (experiment == "semiclassical-report") {
    c.betas = {4, 6, 8, 10, 12};
    t = {{"pairing_gap", 1e-4},   {"pairing_e2", 0.5},    {"e0_shift", 2.0},
         {"corollary", 0.1},      {"psi1_integral", 1e-10}, {"overlap", 0.1},
         {"splitting_spread", 5.0}, {"gaussian_spread", 5.0}, {"tv_final", 1e-6},
         {"corollary_beta", 10.0}, {"pairing_beta", 12.0}, {"shrink_lo", 1.4},
         {"shrink_hi", 3.0}, {"shrink_beta", 6.0}};
  } else if (experiment == "riccati") {
    c.betas = {6};
    t = {{"ratio_lo", 3.0}, {"ratio_hi", 5.0}, {"residual", 1e-3}};
  } else if (experiment == "hitting-time") {
    c.betas = {5, 7};
    c.replicas = 2000;
    t = {{"rate_lo", 1.7}, {"rate_hi", 2.3}, {"ks", 0.05}, {"mean_lo", 0.4}, {"mean_hi", 0.6}};
  } else if (experiment == "first-transition") {
    c.betas = {5};
    c.replicas = 2000;
    t = {{"mean", 0.15}, {"ks", 0.05}};
  } else if (experiment == "count-subcritical") {
    c.betas = {6};
    c.ell = {EllMode::fraction, 0.05};
    c.replicas = 50000;
    t = {{"p1", 0.25}, {"p2_lo", 0.4}, {"p2_hi", 2.5}, {"z_over_n_lo", 1.4}, {"z_over_n_hi", 2.6}};
  } else if (experiment == "poisson-supercritical") {
    c.betas = {5};
    c.ell = {EllMode::fraction, 10.0};
    c.boundary = Boundary::free;
    c.replicas = 400;
    t = {{"mean", 0.15}, {"dispersion", 0.2}, {"ks", 0.08}, {"sign", 0.03}};
  } else if (experiment == "ldp-rate") {
    c.betas = {6};
    c.ell = {EllMode::exponential, 0.5};
    c.boundary = Boundary::free;
    c.replicas = 20000;
    t = {{"rate", 0.05}};
  } else if (experiment == "sampler-crosscheck") {
    c.betas = {5};
    c.replicas = 2000;
    t = {{"tv", 0.02},        {"median", 0.1},      {"row_sum", 1e-12},
         {"balance", 1e-10},  {"semigroup", 1e-10}, {"leakage", 0.0}};
  } else {
    throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
  ExperimentConfig c = default_config(experiment);
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(key, "given twice");

    if (key == "potential") {
      c.potential = v;
    } else if (key == "beta") {
      c.betas = to_list(key, v);
    } else if (key == "grid.R") {
      c.grid_R = to_double(key, v);
    } else if (key == "grid.h") {
      c.grid_h = to_double(key, v);
    } else if (key == "grid.levels") {
      c.grid_levels = to_unsigned(key, v);
    } else if (key == "spectral.K") {
      c.truncation = to_unsigned(key, v);
    } else if (key == "sampling.h") {
      c.sampling_h = to_double(key, v);
    } else if (key == "dt") {
      c.dt = to_double(key, v);
    } else if (key == "ell.mode") {
      if (v == "absolute") {
        c.ell.mode = EllMode::absolute;
      } else if (v == "fraction") {
        c.ell.mode = EllMode::fraction;
      } else if (v == "exponential") {
        c.ell.mode = EllMode::exponential;
      } else {
        throw ConfigError(key, "expected absolute, fraction or exponential");
      }
    } else if (key == "ell.value") {
      c.ell.value = to_double(key, v);
    } else if (key == "boundary") {
      if (v == "stationary") {
        c.boundary = Boundary::stationary;
      } else if (v == "free") {
        c.boundary = Boundary::free;
      } else {
        throw ConfigError(key, "expected stationary or free");
      }
    } else if (key == "crossing.rho1") {
      c.rho1 = to_double(key, v);
    } else if (key == "crossing.rho2") {
      c.rho2 = to_double(key, v);
    } else if (key == "crossing.t_sep") {
      c.t_sep = to_double(key, v);
    } else if (key == "replicas") {
      c.replicas = to_unsigned(key, v);
    } else if (key == "seed") {
      c.seed = to_unsigned(key, v);
    } else if (key == "workers") {
      c.workers = to_unsigned(key, v);
    } else if (key == "out") {
      c.out = v;
    } else if (key == "dump_paths") {
      c.dump_paths = to_unsigned(key, v);
    } else if (key == "em.dt") {
      c.em_dt = to_double(key, v);
    } else if (key == "em.length") {
      c.em_length = to_double(key, v);
    } else if (key == "em.replicas") {
      c.em_replicas = to_unsigned(key, v);
    } else if (key == "em.bin") {
      c.em_bin = to_double(key, v);
    } else if (key == "budget") {
      c.budget = to_double(key, v);
    } else if (key.rfind("tolerance.", 0) == 0) {
      const std::string name = key.substr(10);
      auto it = c.tolerance.find(name);
      if (it == c.tolerance.end()) throw ConfigError(key, "unknown tolerance for " + experiment);
      it->second = to_double(key, v);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& file, const std::string& experiment) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot read " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment);
}

void validate(const ExperimentConfig& c) {
  if (c.potential != "quartic") throw ConfigError("potential", "only 'quartic' is supported");
  if (c.betas.empty()) throw ConfigError("beta", "at least one beta is required");
  for (double b : c.betas) {
    if (!(b > 0.0)) throw ConfigError("beta", "beta must be positive");
  }
  if (!(c.grid_R > 1.0)) throw ConfigError("grid.R", "must exceed 1");
  if (!(c.grid_h >= 0.0)) throw ConfigError("grid.h", "must be nonnegative");
  if (c.grid_levels < 1 || c.grid_levels > 6) throw ConfigError("grid.levels", "must be in 1..6");
  if (c.truncation < 4) throw ConfigError("spectral.K", "must be at least 4");
  if (!(c.sampling_h > 0.0) || !(c.sampling_h < 0.1)) throw ConfigError("sampling.h", "must be in (0, 0.1)");
  if (!(c.dt >= 0.0)) throw ConfigError("dt", "must be nonnegative");
  if (!(c.ell.value > 0.0) && c.ell.mode != EllMode::exponential) {
    throw ConfigError("ell.value", "must be positive");
  }
  if (c.ell.mode == EllMode::exponential) {
    const double cw = surface_tension(quartic_potential());
    if (!(c.ell.value >= 0.0 && c.ell.value < cw)) {
      throw ConfigError("ell.value", "alpha must lie in [0, C_W)");
    }
  }
  if (!(c.rho1 > 0.0 && c.rho1 < c.rho2 && c.rho2 < 1.0)) {
    throw ConfigError("crossing.rho1", "need 0 < rho1 < rho2 < 1");
  }
  if (!(c.t_sep >= 0.0)) throw ConfigError("crossing.t_sep", "must be nonnegative");
  if (c.replicas < 1) throw ConfigError("replicas", "must be at least 1");
  if (!(c.em_dt > 0.0)) throw ConfigError("em.dt", "must be positive");
  if (!(c.em_length > 0.0)) throw ConfigError("em.length", "must be positive");
  if (c.em_replicas < 1) throw ConfigError("em.replicas", "must be at least 1");
  if (!(c.em_bin > 0.0)) throw ConfigError("em.bin", "must be positive");
  if (!(c.budget > 0.0)) throw ConfigError("budget", "must be positive");
  for (const auto& [k, v] : c.tolerance) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("tolerance." + k, "must be nonnegative");
  }
}

}  // namespace phi4
