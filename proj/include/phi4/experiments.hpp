#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phi4/config.hpp"
#include "phi4/interfaces.hpp"
#include "phi4/report.hpp"

namespace phi4 {

struct ExperimentResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<double> betas;
  std::vector<ReportRow> rows;
  // Crossing events per beta (count and Poisson experiments only).
  std::map<double, std::vector<CrossingRow>> events;
  double wall_seconds = 0.0;

  bool passed() const;
  std::vector<ReportRow> rows_for(double beta) const;
  // First row with this quantity at this beta; throws std::out_of_range.
  const ReportRow& row(double beta, const std::string& quantity) const;
};

// Runs `name` over cfg.betas. Replica i of beta index b draws from a stream
// derived from (cfg.seed, b, i) only, so the rows do not depend on the
// worker count. Path dumps (cfg.dump_paths > 0) go to <out>/paths.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& name);

// <out>/<name>-<beta>.csv, <out>/<name>-<beta>-events.csv when there are
// events, and <out>/summary.json.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

// Derived stream seed for one (purpose, beta index) pair.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t beta_index, std::uint64_t purpose);

}  // namespace phi4
