// phi4 <experiment> [--config FILE] [--seed N] [--out DIR] [--replicas N] [--workers N]

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "phi4/config.hpp"
#include "phi4/error.hpp"
#include "phi4/experiments.hpp"
#include "phi4/report.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kNumeric = 3 };

void print_rows(const phi4::ExperimentResult& r) {
  for (const auto& row : r.rows) {
    const char* tag = row.rule == phi4::Rule::info ? "info" : (row.pass ? "PASS" : "FAIL");
    std::printf("%-4s beta=%-4s %-32s measured=%-14s predicted=%s\n", tag,
                phi4::format_number(row.beta).c_str(), row.quantity.c_str(),
                phi4::format_number(row.measured).c_str(),
                phi4::format_number(row.predicted).c_str());
  }
  std::printf("%s: %s in %.1f s\n", r.name.c_str(), r.passed() ? "pass" : "FAIL",
              r.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-well path measure experiments"};
  std::string experiment, config_file, out;
  unsigned long long seed = 0;
  std::size_t replicas = 0, workers = 0;
  std::string names;
  for (const auto& n : phi4::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names)->required();
  app.add_option("--config", config_file, "key = value file applied over the defaults");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  auto* rep_opt = app.add_option("--replicas", replicas, "Replica count");
  auto* work_opt = app.add_option("--workers", workers, "Worker threads (0: all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  phi4::ExperimentConfig cfg;
  try {
    cfg = config_file.empty() ? phi4::default_config(experiment)
                              : phi4::load_config(config_file, experiment);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out = out;
    if (*rep_opt) cfg.replicas = replicas;
    if (*work_opt) cfg.workers = workers;
    phi4::validate(cfg);
  } catch (const phi4::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }

  try {
    const phi4::ExperimentResult r = phi4::run_experiment(cfg, experiment);
    phi4::write_outputs(cfg, r);
    print_rows(r);
    return r.passed() ? kPass : kFail;
  } catch (const phi4::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const phi4::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const phi4::DomainError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
}
