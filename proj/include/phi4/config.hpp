#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace phi4 {

enum class EllMode { absolute, fraction, exponential };

// How the path length is chosen: an absolute length, a multiple of the
// critical length lbar, or exp(alpha beta) with alpha in [0, C_W).
struct EllSpec {
  EllMode mode = EllMode::fraction;
  double value = 1.0;

  double resolve(double beta, double lbar) const;
};

enum class Boundary { stationary, free };

struct ExperimentConfig {
  std::string potential = "quartic";
  std::vector<double> betas;

  // Spectral grids. grid.h = 0 picks 0.004 below beta = 8 and 0.002 above.
  double grid_R = 2.5;
  double grid_h = 0.0;
  std::size_t grid_levels = 2;
  std::size_t truncation = 8;

  // Path sampling. dt = 0 picks 0.005 below beta = 8 and 0.002 above.
  double sampling_h = 0.005;
  double dt = 0.0;
  EllSpec ell;
  Boundary boundary = Boundary::stationary;

  // Crossing detection. t_sep = 0 uses default_separation().
  double rho1 = 0.2;
  double rho2 = 0.6;
  double t_sep = 0.0;

  std::size_t replicas = 1000;
  std::uint64_t seed = 20240601;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::string out = "out";
  std::size_t dump_paths = 0;

  // Euler-Maruyama cross-check.
  double em_dt = 1e-3;
  double em_length = 5e4;
  std::size_t em_replicas = 4;
  double em_bin = 0.1;

  // Budget for stopping-time simulations, in units of lbar.
  double budget = 20.0;

  // Tolerances; defaults follow the acceptance thresholds.
  std::map<std::string, double> tolerance;

  double tol(const std::string& key) const;
  double spectral_spacing(double beta) const;
  double time_step(double beta) const;
};

// Defaults for a named experiment (betas, ell, replicas, ...).
ExperimentConfig default_config(const std::string& experiment);

// Flat "key = value" text with dotted keys and '#' comments, applied on top
// of the experiment defaults. Unknown keys raise ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment);
ExperimentConfig load_config(const std::string& file, const std::string& experiment);

// Re-checks every invariant; throws ConfigError naming the field.
void validate(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();

}  // namespace phi4
