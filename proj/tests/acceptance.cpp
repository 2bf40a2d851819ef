// Runs every acceptance criterion at its stated tolerance and prints one
// line per criterion. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "phi4/config.hpp"
#include "phi4/experiments.hpp"
#include "phi4/interfaces.hpp"
#include "phi4/potential.hpp"
#include "phi4/semiclassics.hpp"
#include "phi4/spectral.hpp"

using namespace phi4;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Experiment results are shared between criteria; each runs once.
std::map<std::string, ExperimentResult> g_results;

const ExperimentResult& experiment(const std::string& name) {
  auto it = g_results.find(name);
  if (it == g_results.end()) {
    ExperimentConfig cfg = default_config(name);
    cfg.out = "acceptance-out";
    it = g_results.emplace(name, run_experiment(cfg, name)).first;
    write_outputs(cfg, it->second);
  }
  return it->second;
}

// Gated rows of `name` selected by `keep`; the criterion passes when all of
// them pass and there is at least one.
Outcome from_rows(const std::string& name, const std::function<bool(const ReportRow&)>& keep) {
  Outcome o;
  const auto& r = experiment(name);
  o.seconds = r.wall_seconds;
  std::size_t used = 0;
  for (const auto& row : r.rows) {
    if (row.rule == Rule::info || !keep(row)) continue;
    ++used;
    o.pass = o.pass && row.pass;
    if (!o.detail.empty()) o.detail += "; ";
    const double shown = row.rule == Rule::ratio ? row.ratio : row.measured;
    o.detail += row.quantity + (row.rule == Rule::ratio ? "[ratio]" : "") + "@" +
                format_number(row.beta) + "=" + fmt("%.4g", shown) + (row.pass ? "" : "(x)");
  }
  if (used == 0) {
    o.pass = false;
    o.detail = "no gated rows";
  }
  return o;
}

bool any_of(const ReportRow& r, std::initializer_list<const char*> names) {
  return std::any_of(names.begin(), names.end(), [&](const char* n) { return r.quantity == n; });
}

Outcome harmonic_oracle() {
  Outcome o;
  const Potential h = harmonic_potential();
  double worst = 0.0;
  for (double beta : {1.0, 7.0}) {
    const SpectralModel m = refine_extrapolate(h, beta, Grid::with_spacing(8.0, 0.01), 3, 8);
    for (std::size_t k = 0; k < 6; ++k) worst = std::max(worst, std::abs(m.eigenvalues[k] - (k + 0.5)));
  }
  o.pass = worst <= 1e-6;
  o.detail = "max |E_k - (k+1/2)| = " + fmt("%.3g", worst);
  return o;
}

Outcome constants() {
  Outcome o;
  const Potential w = quartic_potential();
  const double cw = surface_tension(w), aw = tunneling_prefactor(w), u0 = agmon_distance(w, 0.0);
  const double d1 = std::abs(cw - 4.0 / 3.0);
  const double d2 = std::abs(aw - 8.0 * std::sqrt(2.0 / std::numbers::pi));
  const double d3 = std::abs(u0 - 2.0 / 3.0);
  o.pass = d1 <= 1e-10 && d2 <= 1e-6 && d3 <= 1e-10;
  o.detail = "C_W=" + fmt("%.12f", cw) + " A_W=" + fmt("%.9f", aw) + " U(0)=" + fmt("%.12f", u0);
  return o;
}

Outcome splitting() {
  Outcome o;
  const Potential w = quartic_potential();
  std::vector<double> r;
  for (double beta : {4.0, 6.0, 8.0, 10.0}) r.push_back(semiclassical_report(default_model(w, beta)).splitting_ratio);
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  const double spread = *hi / *lo;
  o.pass = spread <= 5.0;
  o.detail = "max/min = " + fmt("%.4g", spread) + " (ratios " + fmt("%.4g", r[0]) + " .. " +
             fmt("%.4g", r[3]) + ")";
  return o;
}

Outcome functional_identities() {
  Outcome o;
  const Potential w = quartic_potential();
  // Instanton X = tanh(t) solves X' = U'(X) from -1 to 0.
  const double dt = 1e-3;
  std::vector<double> x;
  for (double t = -12.0; t <= 1e-12; t += dt) x.push_back(std::tanh(t));
  const double rate = path_rate(x, dt, w);
  const bool rate_ok = std::abs(rate / (4.0 / 3.0) - 1.0) <= 0.02;

  const StepProfile m(-1, {0.3, 0.7});
  const double d1 = dist_to_manifold(m, 1, 1.0);
  // Brute force over one-jump and no-jump profiles with jumps at m's breakpoints.
  double brute = std::numeric_limits<double>::infinity();
  for (int s : {-1, 1}) {
    for (const std::vector<double>& j : {std::vector<double>{}, {0.3}, {0.7}}) {
      brute = std::min(brute, lp_distance(m, StepProfile(s, j), 1.0));
    }
  }
  const bool examples_ok = d1 == brute && std::abs(d1 - 0.6) < 1e-12 && d1 >= 0.3 &&
                           dist_to_manifold(m, 2, 1.0) == 0.0;

  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(u(rng) * 6.0);
    std::vector<double> jumps;
    while (jumps.size() < k) {
      jumps.push_back(u(rng));
      std::sort(jumps.begin(), jumps.end());
      jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
      if (jumps.front() == 0.0) jumps.erase(jumps.begin());
    }
    double delta = jumps.front();
    for (std::size_t i = 1; i < jumps.size(); ++i) delta = std::min(delta, jumps[i] - jumps[i - 1]);
    delta = std::min(delta, 1.0 - jumps.back());
    const double p = 1.0 + 3.0 * u(rng);
    const StepProfile prof(u(rng) < 0.5 ? -1 : 1, jumps);
    if (dist_to_manifold(prof, k - 1, p) < 2.0 * std::pow(delta / 2.0, 1.0 / p) - 1e-12) ++violations;
  }
  o.pass = rate_ok && examples_ok && violations == 0;
  o.detail = "path_rate=" + fmt("%.5f", rate) + " dist=" + fmt("%.3g", d1) + " brute=" +
             fmt("%.3g", brute) + " bound violations=" + std::to_string(violations) + "/1000";
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "harmonic oracle", 5, harmonic_oracle},
      {2, "constants", 1, constants},
      {3, "gap law", 300,
       [] { return from_rows("gap-scan", [](const ReportRow& r) { return any_of(r, {"gap_ratio", "trend_gap_ratio"}); }); }},
      {4, "eigenvalue pairing", 120,
       [] {
         return from_rows("semiclassical-report", [](const ReportRow& r) {
           return r.beta == 12.0 && any_of(r, {"E1-E0", "E2-E0", "|E0-1|"});
         });
       }},
      {5, "Riccati residual", 120,
       [] { return from_rows("riccati", [](const ReportRow& r) { return any_of(r, {"residual_ratio"}); }); }},
      {6, "well integrals", 60,
       [] {
         return from_rows("semiclassical-report", [](const ReportRow& r) {
           return r.beta == 10.0 && any_of(r, {"corollary_ratio", "|int_psi1|"});
         });
       }},
      {7, "eigenfunction splitting", 300, splitting},
      {8, "kernel exactness", 60,
       [] {
         return from_rows("sampler-crosscheck", [](const ReportRow& r) {
           return any_of(r, {"row_sum_error", "detailed_balance_error", "semigroup_error"});
         });
       }},
      {9, "hitting-time law", 900,
       [] {
         return from_rows("hitting-time", [](const ReportRow& r) {
           return any_of(r, {"rate_x_lbar", "ks_exp2", "mean_over_lbar", "trend_rate"});
         });
       }},
      {10, "first transition", 1200,
       [] { return from_rows("first-transition", [](const ReportRow& r) { return any_of(r, {"mean_over_lbar", "ks_exp1"}); }); }},
      {11, "subcritical counts", 1800,
       [] { return from_rows("count-subcritical", [](const ReportRow&) { return true; }); }},
      {12, "supercritical Poisson limit", 1800,
       [] { return from_rows("poisson-supercritical", [](const ReportRow&) { return true; }); }},
      {13, "LDP rate", 1200,
       [] { return from_rows("ldp-rate", [](const ReportRow& r) { return any_of(r, {"-log P(N>=1)/beta"}); }); }},
      {14, "TV decay", 120,
       [] {
         return from_rows("semiclassical-report", [](const ReportRow& r) {
           return r.beta == 6.0 && any_of(r, {"tv_q_decreasing", "tv_q_T=20_bound"});
         });
       }},
      {15, "sampler cross-check", 900,
       [] {
         return from_rows("sampler-crosscheck", [](const ReportRow& r) {
           return any_of(r, {"em_histogram_tv", "hitting_median_em/chain"});
         });
       }},
      {16, "functional identities", 300, functional_identities},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
      if (o.seconds == 0.0) o.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const bool in_time = o.seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-28s %s  [%.1f s%s]  %s\n", c.id, c.title, pass ? "PASS" : "FAIL",
                o.seconds, in_time ? "" : " over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
