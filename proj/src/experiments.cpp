#include "phi4/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "phi4/error.hpp"
#include "phi4/path_io.hpp"
#include "phi4/potential.hpp"
#include "phi4/sampler.hpp"
#include "phi4/semiclassics.hpp"
#include "phi4/spectral.hpp"
#include "phi4/stats.hpp"

namespace phi4 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Purposes for stream_seed.
enum : std::uint64_t {
  kPaths = 1,
  kHitting = 2,
  kTransition = 3,
  kEmHistogram = 4,
  kEmHitting = 5,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t worker_count(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Results are stored by replica index; the first exception wins and stops
// the remaining work.
template <class T>
std::vector<T> run_replicas(std::size_t n, std::size_t workers,
                            const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&]() {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Potential make_potential(const ExperimentConfig& cfg) {
  if (cfg.potential == "quartic") return quartic_potential();
  throw ConfigError("potential", "only 'quartic' is supported");
}

std::string params(std::initializer_list<std::pair<const char*, double>> kv,
                   const std::string& extra = "") {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += format_number(v);
  }
  if (!extra.empty()) {
    if (!s.empty()) s += ';';
    s += extra;
  }
  return s;
}

// Sampling model, kernel and the two critical lengths for one beta.
struct Chain {
  double beta = 0.0;
  double dt = 0.0;
  double lbar = 0.0;       // asymptotic 2 / (A_W sqrt(beta) e^{-beta C_W})
  double lbar_grid = 0.0;  // 2 / gap of the sampling grid, what the chain sees
  std::shared_ptr<const SpectralModel> model;
  std::shared_ptr<const TransitionKernel> kernel;
};

Chain make_chain(const ExperimentConfig& cfg, const Potential& p, double beta) {
  Chain c;
  c.beta = beta;
  c.dt = cfg.time_step(beta);
  c.lbar = critical_length(beta, p);
  c.model = std::make_shared<const SpectralModel>(
      sampling_model(p, beta, cfg.sampling_h, std::max<std::size_t>(cfg.truncation, 2)));
  c.lbar_grid = 2.0 / (c.model->grid_eigenvalues[1] - c.model->grid_eigenvalues[0]);
  c.kernel = std::make_shared<const TransitionKernel>(c.model, c.dt);
  return c;
}

std::string boundary_name(Boundary b) { return b == Boundary::free ? "free" : "stationary"; }

void dump_path(const ExperimentConfig& cfg, const std::string& name, double beta, std::size_t r,
               const PathSample& path) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.out) / "paths";
  fs::create_directories(dir);
  const std::string file =
      name + "-" + format_number(beta) + "-" + std::to_string(r) + ".bin";
  write_path_file((dir / file).string(), path);
}

double fraction(std::size_t k, std::size_t n) {
  return n == 0 ? kNaN : static_cast<double>(k) / static_cast<double>(n);
}

// ---------------------------------------------------------------- spectral

SpectralModel spectral_model(const ExperimentConfig& cfg, const Potential& p, double beta,
                             std::size_t count) {
  const Grid base = Grid::with_spacing(cfg.grid_R, cfg.spectral_spacing(beta));
  return refine_extrapolate(p, beta, base, cfg.grid_levels, count);
}

void gap_scan(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  std::vector<double> ratios;
  for (double beta : cfg.betas) {
    const SpectralModel m = spectral_model(cfg, p, beta, std::max<std::size_t>(cfg.truncation, 4));
    const double gap = spectral_gap(m);
    const double pred = predicted_gap(beta, p);
    const std::string echo =
        params({{"R", cfg.grid_R}, {"h", m.grid.spacing()}, {"levels", double(m.levels)}},
               "warnings=" + std::to_string(m.warnings.size()));
    auto r = ratio_row(x, beta, "gap_ratio", gap, pred, cfg.tol("gap_ratio"));
    r.params = echo;
    res.rows.push_back(r);
    ratios.push_back(r.ratio);
    auto g = info_row(x, beta, "gap_finest_grid", m.grid_eigenvalues[1] - m.grid_eigenvalues[0],
                      pred);
    g.params = echo;
    res.rows.push_back(g);
    for (std::size_t k = 0; k < 4; ++k) {
      auto e = info_row(x, beta, "E" + std::to_string(k), m.eigenvalues[k],
                        harmonic_level(k / 2, p));
      e.params = echo;
      res.rows.push_back(e);
    }
    if (std::isfinite(m.convergence_order[0])) {
      res.rows.push_back(info_row(x, beta, "order_E0", m.convergence_order[0], 2.0));
    }
  }
  if (cfg.betas.size() >= 2) {
    auto t = upper_row(x, cfg.betas.back(), "trend_gap_ratio", std::abs(ratios.back() - 1.0),
                       std::abs(ratios.front() - 1.0));
    t.params = params({{"beta_first", cfg.betas.front()}, {"beta_last", cfg.betas.back()}});
    res.rows.push_back(t);
  }
}

void semiclassical(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const double corollary_beta = cfg.tol("corollary_beta");
  const double pairing_beta = cfg.tol("pairing_beta");
  const std::size_t count = std::max<std::size_t>(cfg.truncation, 4);
  std::vector<double> splitting, gauss0, gauss1;
  std::map<double, std::vector<double>> energies;
  for (double beta : cfg.betas) {
    const SpectralModel m = spectral_model(cfg, p, beta, count);
    const SemiclassicalReport s = semiclassical_report(m);
    energies[beta] = s.energies;
    const std::string echo = params(
        {{"R", cfg.grid_R}, {"h", m.grid.spacing()}, {"levels", double(m.levels)},
         {"K", double(count)}},
        "warnings=" + std::to_string(s.warnings.size() + m.warnings.size()));
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    const double e10 = s.energies[1] - s.energies[0];
    const double e20 = s.energies[2] - s.energies[0];
    if (beta >= pairing_beta) {
      push(upper_row(x, beta, "E1-E0", e10, cfg.tol("pairing_gap")));
      push(absolute_row(x, beta, "E2-E0", e20, 2.0, cfg.tol("pairing_e2")));
    } else {
      push(info_row(x, beta, "E1-E0", e10, s.predicted_gap));
      push(info_row(x, beta, "E2-E0", e20, 2.0));
    }
    push(upper_row(x, beta, "|E0-1|", std::abs(s.energies[0] - s.harmonic_levels[0]),
                   cfg.tol("e0_shift") / beta));
    push(info_row(x, beta, "gap_ratio", s.gap_ratio, 1.0));
    push(info_row(x, beta, "critical_length", s.critical_length));

    const double cor = s.right_half_psi0 / s.well_integral_target;
    if (beta >= corollary_beta) {
      push(ratio_row(x, beta, "corollary_ratio", cor, 1.0, cfg.tol("corollary")));
      push(ratio_row(x, beta, "overlap_psi0_psi1_plus", s.overlap_psi0_psi1[0], 0.5,
                     cfg.tol("overlap")));
      push(ratio_row(x, beta, "overlap_psi0_psi1_minus", s.overlap_psi0_psi1[1], -0.5,
                     cfg.tol("overlap")));
    } else {
      push(info_row(x, beta, "corollary_ratio", cor, 1.0));
      push(info_row(x, beta, "overlap_psi0_psi1_plus", s.overlap_psi0_psi1[0], 0.5));
      push(info_row(x, beta, "overlap_psi0_psi1_minus", s.overlap_psi0_psi1[1], -0.5));
    }
    push(upper_row(x, beta, "|int_psi1|", std::abs(s.total_integral_psi1),
                   cfg.tol("psi1_integral")));
    push(info_row(x, beta, "well_integral_psi0_plus", s.well_integral_psi0[0],
                  s.well_integral_target / std::sqrt(2.0)));
    push(info_row(x, beta, "gaussian_deviation_0", s.gaussian_deviation[0]));
    push(info_row(x, beta, "gaussian_deviation_1", s.gaussian_deviation[1]));
    push(info_row(x, beta, "splitting_ratio", s.splitting_ratio));
    push(info_row(x, beta, "decay_rate", s.decay_rate, 2.0 / 3.0));
    splitting.push_back(s.splitting_ratio);
    gauss0.push_back(s.gaussian_deviation[0]);
    gauss1.push_back(s.gaussian_deviation[1]);

    // Half-line marginal against pi.
    const std::vector<double> pi = stationary_density(m);
    const double ts[] = {2.0, 5.0, 10.0, 20.0};
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    double last = 0.0;
    for (double t : ts) {
      const double tv = total_variation(half_line_marginal(m, t, count), pi, m.weight());
      char label[32];
      std::snprintf(label, sizeof label, "tv_q_T=%g", t);
      push(info_row(x, beta, label, tv));
      decreasing = decreasing && tv < prev;
      prev = tv;
      last = tv;
    }
    push(interval_row(x, beta, "tv_q_decreasing", decreasing ? 1.0 : 0.0, 1.0, 1.0, 1.0));
    push(upper_row(x, beta, "tv_q_T=20_bound", last, cfg.tol("tv_final")));
  }

  const double last = cfg.betas.back();
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  if (cfg.betas.size() >= 2) {
    res.rows.push_back(
        upper_row(x, last, "splitting_spread", spread(splitting), cfg.tol("splitting_spread")));
    res.rows.push_back(upper_row(x, last, "gaussian_spread_0", spread(gauss0),
                                 cfg.tol("gaussian_spread")));
    res.rows.push_back(upper_row(x, last, "gaussian_spread_1", spread(gauss1),
                                 cfg.tol("gaussian_spread")));
  }
  // |E_k - limit| should roughly halve when beta doubles.
  const double b = cfg.tol("shrink_beta");
  const auto from = energies.find(b);
  const auto it = energies.find(2.0 * b);
  if (from != energies.end() && it != energies.end()) {
    const auto& lo = from->second;
    const auto& hi = it->second;
    for (std::size_t k = 0; k < 4; ++k) {
      const double lim = harmonic_level(k / 2, p);
      auto r = interval_row(x, 2.0 * b, "shrink_E" + std::to_string(k),
                            std::abs(lo[k] - lim) / std::abs(hi[k] - lim), cfg.tol("shrink_lo"),
                            cfg.tol("shrink_hi"), 2.0);
      r.params = params({{"beta_from", b}, {"beta_to", 2.0 * b}});
      res.rows.push_back(r);
    }
  }
}

void riccati(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  for (double beta : cfg.betas) {
    const Grid coarse = Grid::with_spacing(cfg.grid_R, cfg.spectral_spacing(beta));
    const Grid fine = coarse.refined();
    const double r1 = riccati_residual(solve_parity_reduced(p, beta, coarse, 2));
    const double r2 = riccati_residual(solve_parity_reduced(p, beta, fine, 2));
    const std::string echo = params({{"R", cfg.grid_R}, {"h", coarse.spacing()}});
    auto a = info_row(x, beta, "residual_h", r1);
    a.params = echo;
    auto b = upper_row(x, beta, "residual_h/2", r2, cfg.tol("residual"));
    b.params = echo;
    auto c = interval_row(x, beta, "residual_ratio", r1 / r2, cfg.tol("ratio_lo"),
                          cfg.tol("ratio_hi"), 4.0);
    c.params = echo;
    res.rows.insert(res.rows.end(), {a, b, c});
  }
}

// ---------------------------------------------------------------- stopping times

struct Stop {
  double time = 0.0;
  char censored = 0;
  std::size_t leakage = 0;
};

void hitting_time(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  std::vector<double> trend;
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const double budget = cfg.budget * c.lbar;
    const std::uint64_t master = stream_seed(cfg.seed, b, kHitting);
    const auto& k = *c.kernel;
    auto stops = run_replicas<Stop>(cfg.replicas, workers, [&](std::size_t r) {
      Rng rng = replica_rng(master, r);
      const StoppingTime st = hitting_time_of_zero(k, rng, budget);
      return Stop{st.time, static_cast<char>(st.censored), st.leakage};
    });
    std::vector<double> t(stops.size());
    std::vector<char> cens(stops.size());
    std::size_t leak = 0, ncens = 0;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      t[i] = stops[i].time / c.lbar;
      cens[i] = stops[i].censored;
      leak += stops[i].leakage;
      ncens += stops[i].censored ? 1 : 0;
    }
    const RateFit fit = exp_rate_fit(t, cens);
    const SampleSummary sum = summarize(t, ncens);
    const double ks = ks_statistic(t, exponential_cdf(2.0));
    const std::string echo =
        params({{"dt", c.dt}, {"h", c.model->grid.spacing()}, {"lbar", c.lbar},
                {"replicas", double(cfg.replicas)}, {"budget", cfg.budget}});
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    push(interval_row(x, beta, "rate_x_lbar", fit.rate, cfg.tol("rate_lo"), cfg.tol("rate_hi"),
                      2.0));
    push(info_row(x, beta, "rate_x_lbar_ci_lower", fit.lower, 2.0));
    push(info_row(x, beta, "rate_x_lbar_ci_upper", fit.upper, 2.0));
    push(upper_row(x, beta, "ks_exp2", ks, cfg.tol("ks")));
    push(interval_row(x, beta, "mean_over_lbar", sum.mean, cfg.tol("mean_lo"), cfg.tol("mean_hi"),
                      0.5));
    push(info_row(x, beta, "median_time", sum.median() * c.lbar));
    push(info_row(x, beta, "censored_fraction", fraction(ncens, t.size()), 0.0));
    push(info_row(x, beta, "leakage", double(leak), 0.0));
    // Same statistics against the grid's own critical length.
    const double g = c.lbar / c.lbar_grid;
    push(info_row(x, beta, "lbar_grid", c.lbar_grid, c.lbar));
    push(info_row(x, beta, "rate_x_lbar_grid", fit.rate / g, 2.0));
    push(info_row(x, beta, "ks_exp2_lbar_grid", ks_statistic(t, exponential_cdf(2.0 * g))));
    trend.push_back(std::abs(fit.rate / 2.0 - 1.0));
  }
  if (trend.size() >= 2) {
    auto r = upper_row(x, cfg.betas.back(), "trend_rate", trend.back(), trend.front());
    r.params = params({{"beta_first", cfg.betas.front()}, {"beta_last", cfg.betas.back()}});
    res.rows.push_back(r);
  }
}

void first_transition(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const double t_sep = cfg.t_sep > 0.0 ? cfg.t_sep : default_separation(beta, c.lbar, c.lbar);
    const double budget = cfg.budget * c.lbar;
    const std::uint64_t master = stream_seed(cfg.seed, b, kTransition);
    const auto& k = *c.kernel;
    auto stops = run_replicas<Stop>(cfg.replicas, workers, [&](std::size_t r) {
      Rng rng = replica_rng(master, r);
      const StoppingTime st = first_transition_time(k, t_sep, rng, budget);
      return Stop{st.time, static_cast<char>(st.censored), st.leakage};
    });
    std::vector<double> t(stops.size());
    std::size_t leak = 0, ncens = 0;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      t[i] = stops[i].time / c.lbar;
      leak += stops[i].leakage;
      ncens += stops[i].censored ? 1 : 0;
    }
    const SampleSummary sum = summarize(t, ncens);
    const std::string echo =
        params({{"dt", c.dt}, {"h", c.model->grid.spacing()}, {"lbar", c.lbar}, {"T_sep", t_sep},
                {"replicas", double(cfg.replicas)}, {"budget", cfg.budget}});
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    push(ratio_row(x, beta, "mean_over_lbar", sum.mean, 1.0, cfg.tol("mean")));
    push(upper_row(x, beta, "ks_exp1", ks_statistic(t, exponential_cdf(1.0)), cfg.tol("ks")));
    push(info_row(x, beta, "censored_fraction", fraction(ncens, t.size()), 0.0));
    push(info_row(x, beta, "leakage", double(leak), 0.0));
    const double g = c.lbar / c.lbar_grid;
    push(info_row(x, beta, "lbar_grid", c.lbar_grid, c.lbar));
    push(info_row(x, beta, "mean_over_lbar_grid", sum.mean * g, 1.0));
    push(info_row(x, beta, "ks_exp1_lbar_grid", ks_statistic(t, exponential_cdf(g))));
  }
}

// ---------------------------------------------------------------- paths

struct PathRun {
  const Chain* chain = nullptr;
  std::shared_ptr<const FreeBoundarySampler> free;
  double length = 0.0;
  CrossingConfig crossing;
  std::uint64_t master = 0;
};

PathRun make_run(const ExperimentConfig& cfg, const Chain& c, std::size_t beta_index) {
  PathRun run;
  run.chain = &c;
  run.length = cfg.ell.resolve(c.beta, c.lbar);
  if (cfg.boundary == Boundary::free) {
    run.free = std::make_shared<const FreeBoundarySampler>(c.kernel);
  }
  run.crossing.rho1 = cfg.rho1;
  run.crossing.rho2 = cfg.rho2;
  run.crossing.ell = run.length;
  run.crossing.t_sep =
      cfg.t_sep > 0.0 ? cfg.t_sep : default_separation(c.beta, run.length, c.lbar);
  run.crossing.validate();
  run.master = stream_seed(cfg.seed, beta_index, kPaths);
  return run;
}

PathSample draw_path(const PathRun& run, std::size_t r) {
  Rng rng = replica_rng(run.master, r);
  if (run.free) return run.free->sample(run.length, rng, run.master);
  return sample_stationary_path(*run.chain->kernel, run.length, rng, run.master);
}

std::string path_echo(const ExperimentConfig& cfg, const PathRun& run) {
  const Chain& c = *run.chain;
  return params({{"ell", run.length}, {"lbar", c.lbar}, {"dt", c.dt},
                 {"h", c.model->grid.spacing()}, {"T_sep", run.crossing.t_sep},
                 {"rho1", cfg.rho1}, {"rho2", cfg.rho2}, {"replicas", double(cfg.replicas)}},
                "boundary=" + boundary_name(cfg.boundary));
}

// Two consecutive outer hysteresis levels of opposite sign.
bool hysteresis_transition(const CrossingRecord& rec) {
  double prev = 0.0;
  for (std::size_t k = 0; k < rec.levels.size(); k += 2) {
    if (prev * rec.levels[k] < 0.0) return true;
    prev = rec.levels[k];
  }
  return false;
}

struct CountOutcome {
  std::size_t N = 0, Z = 0, leakage = 0;
  bool hysteresis = false;
  std::vector<CrossingRow> events;
};

constexpr std::size_t kMaxEventReplicas = 2000;

void count_subcritical(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const PathRun run = make_run(cfg, c, b);
    auto out = run_replicas<CountOutcome>(cfg.replicas, workers, [&](std::size_t r) {
      const PathSample path = draw_path(run, r);
      if (r < cfg.dump_paths) dump_path(cfg, x, beta, r, path);
      const CrossingRecord rec = detect_crossings(path, run.crossing);
      CountOutcome o{rec.N, rec.Z, path.leakage, hysteresis_transition(rec), {}};
      if (rec.Z > 0) o.events = crossing_rows(r, rec);
      return o;
    });
    std::size_t n1 = 0, n2 = 0, z1 = 0, z2 = 0, hyst = 0, leak = 0, kept = 0;
    auto& events = res.events[beta];
    for (auto& o : out) {
      n1 += o.N >= 1;
      n2 += o.N >= 2;
      z1 += o.Z >= 1;
      z2 += o.Z >= 2;
      hyst += o.hysteresis;
      leak += o.leakage;
      if (!o.events.empty() && kept < kMaxEventReplicas) {
        events.insert(events.end(), o.events.begin(), o.events.end());
        ++kept;
      }
    }
    const double n = static_cast<double>(out.size());
    const double ratio = run.length / c.lbar;
    const double p1 = n1 / n, p2 = n2 / n, pz1 = z1 / n, pz2 = z2 / n;
    const std::string echo = path_echo(cfg, run);
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    push(ratio_row(x, beta, "P(N>=1)", p1, ratio, cfg.tol("p1")));
    push(interval_row(x, beta, "P(N>=2)/(x^2/2)", p2 / (0.5 * ratio * ratio), cfg.tol("p2_lo"),
                      cfg.tol("p2_hi"), 1.0));
    push(interval_row(x, beta, "P(Z>=1)/P(N>=1)", p1 > 0.0 ? pz1 / p1 : kNaN,
                      cfg.tol("z_over_n_lo"), cfg.tol("z_over_n_hi"), 2.0));
    push(info_row(x, beta, "P(Z>=2)/P(N>=2)", p2 > 0.0 ? pz2 / p2 : kNaN, 4.0));
    push(info_row(x, beta, "P(N>=1)_lbar_grid", p1, run.length / c.lbar_grid));
    push(info_row(x, beta, "P(hysteresis_transition)", hyst / n, ratio));
    push(info_row(x, beta, "leakage", double(leak), 0.0));
  }
}

struct PoissonOutcome {
  std::vector<double> events;
  std::vector<std::size_t> counts;
  std::size_t plus = 0, minus = 0, leakage = 0;
  std::vector<CrossingRow> rows;
};

void poisson_supercritical(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  constexpr int kSignPoints = 19;  // s = k / 20
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const PathRun run = make_run(cfg, c, b);
    const double t = run.crossing.t_sep;
    const double start = t / c.lbar, end = (run.length - 2.0 * t) / c.lbar;
    auto out = run_replicas<PoissonOutcome>(cfg.replicas, workers, [&](std::size_t r) {
      const PathSample path = draw_path(run, r);
      if (r < cfg.dump_paths) dump_path(cfg, x, beta, r, path);
      const CrossingRecord rec = detect_zero_returns(path, run.crossing);
      PoissonOutcome o;
      o.events = extract_point_process(rec, c.lbar);
      o.counts = window_counts(o.events, start, end);
      const StepProfile prof = project_to_steps(path, rec, run.crossing);
      for (int k = 1; k <= kSignPoints; ++k) {
        (prof.value(k / 20.0) > 0 ? o.plus : o.minus) += 1;
      }
      o.leakage = path.leakage;
      if (r < 50) o.rows = crossing_rows(r, rec);
      return o;
    });
    std::vector<std::size_t> counts;
    std::vector<double> spacings;
    std::size_t plus = 0, minus = 0, leak = 0;
    auto& events = res.events[beta];
    for (auto& o : out) {
      counts.insert(counts.end(), o.counts.begin(), o.counts.end());
      for (std::size_t j = 1; j < o.events.size(); ++j) {
        spacings.push_back(o.events[j] - o.events[j - 1]);
      }
      plus += o.plus;
      minus += o.minus;
      leak += o.leakage;
      events.insert(events.end(), o.rows.begin(), o.rows.end());
    }
    double mean = 0.0;
    for (auto k : counts) mean += static_cast<double>(k);
    mean = counts.empty() ? kNaN : mean / static_cast<double>(counts.size());
    const Dispersion d = poisson_dispersion(counts);
    const double ks = spacings.empty() ? kNaN : ks_statistic(spacings, exponential_cdf(1.0));
    const double g = c.lbar / c.lbar_grid;
    const std::string echo = path_echo(cfg, run) + ";windows=" + std::to_string(counts.size()) +
                             ";spacings=" + std::to_string(spacings.size());
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    push(ratio_row(x, beta, "window_mean", mean, 1.0, cfg.tol("mean")));
    push(ratio_row(x, beta, "window_dispersion", d.defined ? d.value : kNaN, 1.0,
                   cfg.tol("dispersion")));
    push(upper_row(x, beta, "ks_spacings_exp1", ks, cfg.tol("ks")));
    push(absolute_row(x, beta, "P(sign=+1)", fraction(plus, plus + minus), 0.5, cfg.tol("sign")));
    push(info_row(x, beta, "window_mean_lbar_grid", mean, g));
    push(info_row(x, beta, "ks_spacings_lbar_grid",
                  spacings.empty() ? kNaN : ks_statistic(spacings, exponential_cdf(g))));
    push(info_row(x, beta, "leakage", double(leak), 0.0));
  }
}

void ldp_rate(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  const double cw = surface_tension(p);
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const PathRun run = make_run(cfg, c, b);
    struct Hit {
      char n1 = 0;
      std::size_t leakage = 0;
    };
    auto out = run_replicas<Hit>(cfg.replicas, workers, [&](std::size_t r) {
      const PathSample path = draw_path(run, r);
      if (r < cfg.dump_paths) dump_path(cfg, x, beta, r, path);
      const CrossingRecord rec = detect_zero_returns(path, run.crossing);
      return Hit{static_cast<char>(rec.N >= 1), path.leakage};
    });
    std::size_t n1 = 0, leak = 0;
    for (const auto& h : out) {
      n1 += h.n1;
      leak += h.leakage;
    }
    const double prob = fraction(n1, out.size());
    const double measured = prob > 0.0 ? -std::log(prob) / beta : kNaN;
    const double sharp = -std::log(run.length / c.lbar) / beta;
    const double alpha = std::log(run.length) / beta;
    const std::string echo = path_echo(cfg, run) + ";alpha=" + format_number(alpha);
    auto push = [&](ReportRow r) {
      r.params = echo;
      res.rows.push_back(std::move(r));
    };
    push(absolute_row(x, beta, "-log P(N>=1)/beta", measured, sharp, cfg.tol("rate")));
    push(info_row(x, beta, "P(N>=1)", prob, run.length / c.lbar));
    push(info_row(x, beta, "C_W-alpha", cw - alpha));
    push(info_row(x, beta, "finite_beta_offset", sharp - (cw - alpha), 0.0));
    push(info_row(x, beta, "-log P(N>=1)/beta_lbar_grid", measured,
                  -std::log(run.length / c.lbar_grid) / beta));
    push(info_row(x, beta, "leakage", double(leak), 0.0));
  }
}

// ---------------------------------------------------------------- cross-check

double max_row_sum_error(const TransitionKernel& k) {
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) s += k(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double max_balance_error(const TransitionKernel& k) {
  const auto& pi = k.stationary();
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = i + 1; j < k.size(); ++j) {
      worst = std::max(worst, std::abs(pi[i] * k(i, j) - pi[j] * k(j, i)));
    }
  }
  return worst;
}

double max_stationarity_error(const TransitionKernel& k) {
  const auto& pi = k.stationary();
  double worst = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s += pi[i] * k(i, j);
    worst = std::max(worst, std::abs(s - pi[j]));
  }
  return worst;
}

double max_difference(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

// Masses of psi0^2 on bins of width w over [-R, R]; each grid segment goes
// to the bin holding its midpoint.
std::vector<double> binned_stationary(const SpectralModel& m, double w) {
  const Grid& g = m.grid;
  const double r = g.half_width();
  const std::size_t bins = static_cast<std::size_t>(std::ceil(2.0 * r / w - 1e-9));
  std::vector<double> out(bins, 0.0);
  const auto& psi = m.eigenfunctions[0];
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double mid = 0.5 * (g.x(i) + g.x(i + 1));
    const auto b = std::min(bins - 1, static_cast<std::size_t>((mid + r) / w));
    const double mass = 0.5 * (psi[i] * psi[i] + psi[i + 1] * psi[i + 1]) * g.spacing();
    out[b] += mass;
    total += mass;
  }
  for (double& v : out) v /= total;
  return out;
}

void sampler_crosscheck(const ExperimentConfig& cfg, ExperimentResult& res) {
  const Potential p = make_potential(cfg);
  const std::string& x = res.name;
  const std::size_t workers = worker_count(cfg);
  for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
    const double beta = cfg.betas[b];
    const Chain c = make_chain(cfg, p, beta);
    const TransitionKernel& k = *c.kernel;
    const std::string echo = params({{"dt", c.dt}, {"h", c.model->grid.spacing()}});
    auto push = [&](ReportRow r, const std::string& e) {
      r.params = e;
      res.rows.push_back(std::move(r));
    };

    push(upper_row(x, beta, "row_sum_error", max_row_sum_error(k), cfg.tol("row_sum")), echo);
    push(upper_row(x, beta, "detailed_balance_error", max_balance_error(k), cfg.tol("balance")),
         echo);
    push(upper_row(x, beta, "stationarity_error", max_stationarity_error(k), cfg.tol("balance")),
         echo);
    {
      // P(dt/2)^2 against P(dt), and P(dt)^2 against P(2 dt).
      const TransitionKernel half(c.model, 0.5 * c.dt);
      const TransitionKernel twice(c.model, 2.0 * c.dt);
      const double e1 = max_difference(multiply(half.matrix(), half.matrix()), k.matrix());
      const double e2 = max_difference(multiply(k.matrix(), k.matrix()), twice.matrix());
      push(upper_row(x, beta, "semigroup_error", std::max(e1, e2), cfg.tol("semigroup")), echo);
    }
    push(info_row(x, beta, "trimmed_mass", k.trimmed_mass(), 0.0), echo);

    // Euler-Maruyama occupation histogram against pi.
    const auto drift = std::make_shared<const DriftField>(*c.model);
    const double r = c.model->grid.half_width();
    const std::vector<double> pi_bins = binned_stationary(*c.model, cfg.em_bin);
    const std::size_t bins = pi_bins.size();
    const std::size_t em_steps = step_count(cfg.em_length, cfg.em_dt);
    const std::uint64_t em_master = stream_seed(cfg.seed, b, kEmHistogram);
    auto hists = run_replicas<std::vector<double>>(
        cfg.em_replicas, workers, [&](std::size_t rep) {
          Rng rng = replica_rng(em_master, rep);
          EulerMaruyamaStepper em(drift, beta, r, cfg.em_dt);
          double xv = c.model->grid.x(k.sample_stationary(rng));
          std::vector<double> h(bins, 0.0);
          for (std::size_t j = 0; j < em_steps; ++j) {
            xv = em.step(xv, rng);
            const auto bin = std::min(bins - 1, static_cast<std::size_t>((xv + r) / cfg.em_bin));
            h[bin] += 1.0;
          }
          return h;
        });
    std::vector<double> hist(bins, 0.0);
    for (const auto& h : hists) {
      for (std::size_t i = 0; i < bins; ++i) hist[i] += h[i];
    }
    std::vector<double> sym(bins);
    double total = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
      sym[i] = 0.5 * (hist[i] + hist[bins - 1 - i]);
      total += sym[i];
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < bins; ++i) tv += std::abs(sym[i] / total - pi_bins[i]);
    tv *= 0.5;
    const std::string em_echo =
        params({{"em_dt", cfg.em_dt}, {"em_length", cfg.em_length},
                {"em_replicas", double(cfg.em_replicas)}, {"bin", cfg.em_bin}},
               "symmetrized=1");
    push(upper_row(x, beta, "em_histogram_tv", tv, cfg.tol("tv")), em_echo);

    // Hitting times of zero from stationarity, chain against EM.
    const double budget = cfg.budget * c.lbar;
    const std::uint64_t chain_master = stream_seed(cfg.seed, b, kHitting);
    auto chain_stops = run_replicas<Stop>(cfg.replicas, workers, [&](std::size_t rep) {
      Rng rng = replica_rng(chain_master, rep);
      const StoppingTime st = hitting_time_of_zero(k, rng, budget);
      return Stop{st.time, static_cast<char>(st.censored), st.leakage};
    });
    const std::uint64_t em_hit_master = stream_seed(cfg.seed, b, kEmHitting);
    auto em_stops = run_replicas<Stop>(cfg.replicas, workers, [&](std::size_t rep) {
      Rng rng = replica_rng(em_hit_master, rep);
      EulerMaruyamaStepper em(drift, beta, r, cfg.em_dt);
      double xv = c.model->grid.x(k.sample_stationary(rng));
      bool first = true;
      PathSource src = [&]() {
        if (first) {
          first = false;
        } else {
          xv = em.step(xv, rng);
        }
        return xv;
      };
      const StoppingTime st = hitting_time_of_zero(src, cfg.em_dt, budget);
      return Stop{st.time, static_cast<char>(st.censored), 0};
    });
    std::vector<double> tc, te;
    std::size_t leak = 0;
    for (const auto& s : chain_stops) {
      tc.push_back(s.time);
      leak += s.leakage;
    }
    for (const auto& s : em_stops) te.push_back(s.time);
    const double mc = summarize(tc).median(), me = summarize(te).median();
    const std::string hit_echo =
        params({{"dt", c.dt}, {"em_dt", cfg.em_dt}, {"replicas", double(cfg.replicas)},
                {"budget", cfg.budget}});
    push(ratio_row(x, beta, "hitting_median_em/chain", me, mc, cfg.tol("median")), hit_echo);
    push(info_row(x, beta, "hitting_median_chain", mc), hit_echo);
    push(info_row(x, beta, "hitting_median_em", me), hit_echo);
    push(upper_row(x, beta, "leakage", double(leak), cfg.tol("leakage")), hit_echo);
  }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t beta_index, std::uint64_t purpose) {
  return splitmix64(master ^ splitmix64((beta_index << 8) | purpose));
}

bool ExperimentResult::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::vector<ReportRow> ExperimentResult::rows_for(double beta) const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.beta == beta) out.push_back(r);
  }
  return out;
}

const ReportRow& ExperimentResult::row(double beta, const std::string& quantity) const {
  for (const auto& r : rows) {
    if (r.beta == beta && r.quantity == quantity) return r;
  }
  throw std::out_of_range("no row '" + quantity + "' at beta " + format_number(beta));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& name) {
  validate(cfg);
  static const std::map<std::string, void (*)(const ExperimentConfig&, ExperimentResult&)> table = {
      {"gap-scan", gap_scan},
      {"semiclassical-report", semiclassical},
      {"riccati", riccati},
      {"hitting-time", hitting_time},
      {"first-transition", first_transition},
      {"count-subcritical", count_subcritical},
      {"poisson-supercritical", poisson_supercritical},
      {"ldp-rate", ldp_rate},
      {"sampler-crosscheck", sampler_crosscheck},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("experiment", "unknown experiment '" + name + "'");
  ExperimentResult res;
  res.name = name;
  res.seed = cfg.seed;
  res.betas = cfg.betas;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->second(cfg, res);
  } catch (const NumericError& e) {
    throw NumericError(name + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(name + ": " + e.what());
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  auto open = [](const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
  };
  for (double beta : result.betas) {
    const std::string stem = result.name + "-" + format_number(beta);
    auto out = open(dir / (stem + ".csv"));
    write_csv(out, result.name, result.rows_for(beta));
    const auto ev = result.events.find(beta);
    if (ev != result.events.end() && !ev->second.empty()) {
      auto e = open(dir / (stem + "-events.csv"));
      e << "# phi4 " << result.name << " events schema v1\n";
      e << "replica,k,kind,time,level,sign\n";
      for (const auto& row : ev->second) {
        e << row.replica << ',' << row.k << ',' << row.kind << ',' << format_number(row.time)
          << ',' << format_number(row.level) << ',' << row.sign << '\n';
      }
    }
  }
  auto js = open(dir / "summary.json");
  js << summary_json(result.name, result.rows, result.wall_seconds, result.seed) << '\n';
}

}  // namespace phi4
