#include "phi4/interfaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phi4/error.hpp"

namespace phi4 {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::size_t steps_for(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

double path_length(const PathSample& path, const CrossingConfig& cfg) {
  return cfg.ell > 0.0 ? cfg.ell : path.dt * static_cast<double>(path.size() - 1);
}

}  // namespace

void CrossingConfig::validate() const {
  if (!(rho1 > 0.0 && rho1 < rho2 && rho2 < 1.0)) {
    throw DomainError("crossing thresholds need 0 < rho1 < rho2 < 1");
  }
  if (!(t_sep > 0.0)) throw DomainError("separation time must be positive");
}

double default_separation(double beta, double ell, double lbar) {
  return std::min(std::max(10.0 * beta, 20.0), std::min(ell, lbar) / 25.0);
}

CrossingRecord detect_hysteresis_crossings(const PathSample& path, const CrossingConfig& cfg) {
  cfg.validate();
  CrossingRecord rec;
  const auto& v = path.values;
  const double outer = 1.0 - cfg.rho1;
  const double inner = 1.0 - cfg.rho2;
  const double ell = path_length(path, cfg);
  std::size_t j = 0;
  for (std::size_t k = 0;; ++k) {
    const bool even = (k % 2 == 0);
    while (j < v.size()) {
      const double a = std::abs(v[j]);
      if (even ? a >= outer : a <= inner) break;
      ++j;
    }
    if (j >= v.size() || path.time(j) >= ell) break;
    rec.sigma_times.push_back(path.time(j));
    const double level = even ? outer : inner;
    rec.levels.push_back(v[j] < 0.0 ? -level : level);
  }
  return rec;
}

CrossingRecord detect_zero_returns(const PathSample& path, const CrossingConfig& cfg) {
  cfg.validate();
  CrossingRecord rec;
  const auto& v = path.values;
  const double ell = path_length(path, cfg);
  if (!(cfg.t_sep < ell / 4.0)) throw DomainError("separation time must be below ell / 4");
  const std::size_t m = steps_for(cfg.t_sep, path.dt);
  const double stop = ell - 2.0 * cfg.t_sep;
  auto in_window = [&](std::size_t j) { return j < v.size() && path.time(j) < stop - 1e-12 * path.dt; };
  auto value_at = [&](std::size_t j) { return v[std::min(j, v.size() - 1)]; };

  rec.signs.push_back(sign_of(value_at(m)));
  std::size_t start = m;
  while (in_window(start)) {
    std::size_t hit = v.size();
    for (std::size_t j = start; in_window(j); ++j) {
      if (v[j] == 0.0 || (j > start && v[j - 1] * v[j] < 0.0)) {
        hit = j;
        break;
      }
    }
    if (hit == v.size()) break;
    rec.tau_indices.push_back(hit);
    rec.tau_times.push_back(path.time(hit));
    const double before = value_at(rec.tau_indices.size() == 1 ? m : rec.tau_indices[rec.tau_indices.size() - 2] + m);
    const double after = value_at(hit + m);
    rec.signs.push_back(sign_of(after));
    const int flag = before * after < 0.0 ? 1 : 0;
    rec.transition_flags.push_back(flag);
    rec.N += static_cast<std::size_t>(flag);
    start = hit + m;
  }
  rec.Z = rec.tau_times.size();
  return rec;
}

CrossingRecord detect_crossings(const PathSample& path, const CrossingConfig& cfg) {
  CrossingRecord rec = detect_zero_returns(path, cfg);
  CrossingRecord h = detect_hysteresis_crossings(path, cfg);
  rec.sigma_times = std::move(h.sigma_times);
  rec.levels = std::move(h.levels);
  return rec;
}

StoppingTime hitting_time_of_zero(const PathSource& next, double dt, double budget) {
  double prev = next();
  if (prev == 0.0) return {0.0, false, 0};
  for (std::size_t j = 1;; ++j) {
    const double t = static_cast<double>(j) * dt;
    if (t > budget) return {budget, true, 0};
    const double x = next();
    if (x == 0.0 || x * prev < 0.0) return {t, false, 0};
    prev = x;
  }
}

StoppingTime first_transition_time(const PathSource& next, double dt, double t_sep, double budget) {
  if (!(t_sep > 0.0)) throw DomainError("separation time must be positive");
  const std::size_t m = std::max<std::size_t>(1, steps_for(t_sep, dt));
  // Read up to index m: the reference sign at T + sigma_0.
  double x = next();
  std::size_t j = 0;
  auto advance = [&]() -> bool {
    ++j;
    if (static_cast<double>(j) * dt > budget) return false;
    x = next();
    return true;
  };
  while (j < m) {
    if (!advance()) return {budget, true, 0};
  }
  double ref = x;
  for (;;) {
    // Search for the next zero at or after the current index.
    double prev = x;
    bool found = (x == 0.0);
    while (!found) {
      if (!advance()) return {budget, true, 0};
      found = (x == 0.0 || x * prev < 0.0);
      prev = x;
    }
    const std::size_t sigma = j;
    while (j < sigma + m) {
      if (!advance()) return {budget, true, 0};
    }
    if (ref * x < 0.0) return {static_cast<double>(sigma) * dt, false, 0};
    ref = x;
  }
}

namespace {

PathSource kernel_source(const TransitionKernel& k, Rng& rng, std::size_t& leakage) {
  const Grid& g = k.model().grid;
  auto state = std::make_shared<std::ptrdiff_t>(-1);
  return [&k, &rng, &leakage, &g, state]() {
    std::size_t i;
    if (*state < 0) {
      i = k.sample_stationary(rng);
    } else {
      i = k.sample_next(static_cast<std::size_t>(*state), rng);
    }
    *state = static_cast<std::ptrdiff_t>(i);
    if (k.is_leak_node(i)) ++leakage;
    return g.x(i);
  };
}

}  // namespace

StoppingTime hitting_time_of_zero(const TransitionKernel& k, Rng& rng, double budget) {
  std::size_t leakage = 0;
  auto st = hitting_time_of_zero(kernel_source(k, rng, leakage), k.dt(), budget);
  st.leakage = leakage;
  return st;
}

StoppingTime first_transition_time(const TransitionKernel& k, double t_sep, Rng& rng,
                                   double budget) {
  std::size_t leakage = 0;
  auto st = first_transition_time(kernel_source(k, rng, leakage), k.dt(), t_sep, budget);
  st.leakage = leakage;
  return st;
}

StepProfile::StepProfile(int initial_sign, std::vector<double> jumps)
    : sign_(initial_sign), jumps_(std::move(jumps)) {
  if (sign_ != 1 && sign_ != -1) throw DomainError("initial sign must be +1 or -1");
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (!(jumps_[i] > 0.0 && jumps_[i] < 1.0)) throw DomainError("jumps must lie in (0, 1)");
    if (i > 0 && !(jumps_[i] > jumps_[i - 1])) throw DomainError("jumps must be strictly increasing");
  }
}

int StepProfile::value(double s) const {
  const auto k = std::upper_bound(jumps_.begin(), jumps_.end(), s) - jumps_.begin();
  return (k % 2 == 0) ? sign_ : -sign_;
}

StepProfile project_to_steps(const PathSample& path, const CrossingRecord& rec,
                             const CrossingConfig& cfg) {
  const double ell = path_length(path, cfg);
  int initial = rec.signs.empty() ? 0 : rec.signs.front();
  if (initial == 0) {
    for (double x : path.values) {
      if (x != 0.0) {
        initial = sign_of(x);
        break;
      }
    }
  }
  if (initial == 0) initial = 1;
  std::vector<double> jumps;
  for (std::size_t k = 0; k < rec.tau_times.size(); ++k) {
    if (rec.transition_flags[k]) {
      const double s = rec.tau_times[k] / ell;
      if (s > 0.0 && s < 1.0 && (jumps.empty() || s > jumps.back())) jumps.push_back(s);
    }
  }
  return StepProfile(initial, std::move(jumps));
}

StepProfile project_to_steps(const PathSample& path, const CrossingConfig& cfg) {
  return project_to_steps(path, detect_zero_returns(path, cfg), cfg);
}

double RescaledPath::at(double s) const {
  if (values.size() == 1) return values[0];
  const double pos = std::clamp(s, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), values.size() - 2);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

RescaledPath rescale(const PathSample& path) { return RescaledPath{path.values}; }

RescaledPath sample_profile(const StepProfile& m, std::size_t points) {
  if (points < 2) throw DomainError("need at least two sample points");
  RescaledPath r;
  r.values.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    r.values[i] = m.value(static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return r;
}

LpDistance lp_distance(const RescaledPath& a, const RescaledPath& b, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must be in [1, inf)");
  if (a.size() < 2 || b.size() < 2) throw DomainError("paths need at least two samples");
  LpDistance out;
  const RescaledPath* pa = &a;
  const RescaledPath* pb = &b;
  RescaledPath fine;
  if (a.size() != b.size()) {
    out.resampled = true;
    const RescaledPath& coarse = a.size() < b.size() ? a : b;
    const std::size_t m = std::max(a.size(), b.size());
    fine.values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      fine.values[i] = coarse.at(static_cast<double>(i) / static_cast<double>(m - 1));
    }
    (a.size() < b.size() ? pa : pb) = &fine;
  }
  const std::size_t m = pa->size();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = std::pow(std::abs(pa->values[i] - pb->values[i]), p);
    s += (i == 0 || i + 1 == m) ? 0.5 * d : d;
  }
  out.value = std::pow(s / static_cast<double>(m - 1), 1.0 / p);
  return out;
}

double disagreement(const StepProfile& a, const StepProfile& b) {
  std::vector<double> cuts{0.0, 1.0};
  cuts.insert(cuts.end(), a.jumps().begin(), a.jumps().end());
  cuts.insert(cuts.end(), b.jumps().begin(), b.jumps().end());
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (a.value(mid) != b.value(mid)) total += len;
  }
  return total;
}

double lp_distance(const StepProfile& a, const StepProfile& b, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must be in [1, inf)");
  return 2.0 * std::pow(disagreement(a, b), 1.0 / p);
}

namespace {

struct ManifoldSearch {
  std::vector<double> seg_len;  // segments of m between consecutive breakpoints
  int m_sign;
  double best = std::numeric_limits<double>::infinity();
  std::size_t visited = 0;

  // Segment i starts after jump i-1 of m; q keeps or drops that jump.
  void walk(std::size_t i, int q_value, std::size_t jumps_left, double cost) {
    if (cost >= best) return;
    if (++visited > 50000000) throw DomainError("manifold search too large");
    const int m_value = (i % 2 == 0) ? m_sign : -m_sign;
    const double here = cost + (q_value != m_value ? seg_len[i] : 0.0);
    if (i + 1 == seg_len.size()) {
      best = std::min(best, here);
      return;
    }
    walk(i + 1, q_value, jumps_left, here);
    if (jumps_left > 0) walk(i + 1, -q_value, jumps_left - 1, here);
  }
};

}  // namespace

double dist_to_manifold(const StepProfile& m, std::size_t n, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must be in [1, inf)");
  const std::size_t s = m.jump_count();
  if (n > s + 8) throw DomainError("target jump count exceeds the search bound |S| + 8");
  if (n >= s) return 0.0;
  ManifoldSearch search;
  double left = 0.0;
  for (double j : m.jumps()) {
    search.seg_len.push_back(j - left);
    left = j;
  }
  search.seg_len.push_back(1.0 - left);
  search.m_sign = m.initial_sign();
  for (int q0 : {m.initial_sign(), -m.initial_sign()}) search.walk(0, q0, n, 0.0);
  return 2.0 * std::pow(search.best, 1.0 / p);
}

double rate_function(const StepProfile& m, double alpha, double surface_tension) {
  if (!(alpha >= 0.0) || !(alpha < surface_tension)) {
    throw DomainError("alpha must lie in [0, C_W)");
  }
  return (surface_tension - alpha) * static_cast<double>(m.jump_count());
}

double modica_mortola(const RescaledPath& x, double ell, const Potential& p) {
  if (x.size() < 2) throw DomainError("profile needs at least two samples");
  if (!(ell > 0.0)) throw DomainError("ell must be positive");
  const std::size_t m = x.size();
  const double ds = 1.0 / static_cast<double>(m - 1);
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double slope = (x.values[i + 1] - x.values[i]) / ds;
    kinetic += slope * slope * ds;
    potential += 0.5 * (p(x.values[i]) + p(x.values[i + 1])) * ds;
  }
  return kinetic / (2.0 * ell) + ell * potential;
}

double path_rate(const std::vector<double>& x, double dt, const Potential& p) {
  if (x.size() < 2) throw DomainError("path needs at least two samples");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double v = (x[i + 1] - x[i]) / dt;
    kinetic += 0.5 * v * v * dt;
    potential += 0.5 * (p(x[i]) + p(x[i + 1])) * dt;
  }
  return kinetic + potential + agmon_distance(p, x.back()) - agmon_distance(p, x.front());
}

std::vector<double> extract_point_process(const CrossingRecord& rec, double lbar) {
  std::vector<double> out;
  for (std::size_t k = 0; k < rec.tau_times.size(); ++k) {
    if (rec.transition_flags[k]) out.push_back(rec.tau_times[k] / lbar);
  }
  return out;
}

std::vector<std::size_t> window_counts(const std::vector<double>& events, double start, double end) {
  if (!(end > start)) return {};
  const auto windows = static_cast<std::size_t>(std::floor(end - start + 1e-12));
  std::vector<std::size_t> counts(windows, 0);
  for (double e : events) {
    if (e < start) continue;
    const auto k = static_cast<std::size_t>(std::floor(e - start));
    if (k < windows) ++counts[k];
  }
  return counts;
}

std::vector<CrossingRow> crossing_rows(std::size_t replica, const CrossingRecord& rec) {
  std::vector<CrossingRow> rows;
  for (std::size_t k = 0; k < rec.sigma_times.size(); ++k) {
    rows.push_back({replica, k, "sigma", rec.sigma_times[k], rec.levels[k], sign_of(rec.levels[k])});
  }
  for (std::size_t k = 0; k < rec.tau_times.size(); ++k) {
    rows.push_back({replica, k + 1, "tau", rec.tau_times[k], 0.0, rec.signs[k + 1]});
  }
  return rows;
}

}  // namespace phi4
