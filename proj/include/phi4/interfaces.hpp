#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phi4/potential.hpp"
#include "phi4/sampler.hpp"

namespace phi4 {

struct CrossingConfig {
  double rho1 = 0.2;
  double rho2 = 0.6;
  double t_sep = 20.0;
  double ell = 0.0;

  void validate() const;
};

// Separation time used by the experiments: max(10 beta, 20), but never
// more than min(ell, lbar) / 25 so that the dead time after each
// return stays a small fraction of the expected spacing.
double default_separation(double beta, double ell, double lbar);

struct CrossingRecord {
  // Hysteresis part.
  std::vector<double> sigma_times;
  std::vector<double> levels;  // Y_k = X at sigma_k, reported as the signed level
  // Zero-return part.
  std::vector<double> tau_times;            // tau_1 .. tau_Z
  std::vector<std::size_t> tau_indices;
  std::vector<int> transition_flags;        // 1 if return k changes the sign
  std::vector<int> signs;                   // sign of X_{T + tau_{k-1}}, k = 1..Z+1
  std::size_t Z = 0;
  std::size_t N = 0;
};

// Alternating first hits of the outer levels {+-(1 - rho1)} (even k) and
// the inner levels {+-(1 - rho2)} (odd k). On the grid a hit is the first
// sample at or beyond the level: |X| >= 1 - rho1 for the outer pair,
// |X| <= 1 - rho2 for the inner pair. Times stop at the first miss.
CrossingRecord detect_hysteresis_crossings(const PathSample& path, const CrossingConfig& cfg);

// tau_k = first zero in [T + tau_{k-1}, ell - 2T); a zero at sample j means
// X_j = 0 or a sign change between samples j-1 and j, both inside the
// window, and the event time is that of sample j. N counts k = 1..Z with
// X_{T + tau_{k-1}} X_{T + tau_k} < 0, so N <= Z.
CrossingRecord detect_zero_returns(const PathSample& path, const CrossingConfig& cfg);

// Both parts in one record.
CrossingRecord detect_crossings(const PathSample& path, const CrossingConfig& cfg);

// One sample per call; the first call returns X_0.
using PathSource = std::function<double()>;

struct StoppingTime {
  double time = 0.0;
  bool censored = false;  // budget exhausted; time is the budget
  std::size_t leakage = 0;
};

// First zero of a path started from X_0, no separation constraint.
StoppingTime hitting_time_of_zero(const PathSource& next, double dt, double budget);
StoppingTime hitting_time_of_zero(const TransitionKernel& k, Rng& rng, double budget);

// zeta = sigma_N with sigma_k = first zero at or after T + sigma_{k-1} and N
// the first k with X_{T + sigma_{k-1}} X_{T + sigma_k} < 0.
StoppingTime first_transition_time(const PathSource& next, double dt, double t_sep, double budget);
StoppingTime first_transition_time(const TransitionKernel& k, double t_sep, Rng& rng,
                                   double budget);

// +-1 step profile on (0, 1); the value on [s_{k-1}, s_k) is
// initial_sign * (-1)^(k-1), with s_0 = 0.
class StepProfile {
 public:
  StepProfile(int initial_sign, std::vector<double> jumps);

  int initial_sign() const { return sign_; }
  const std::vector<double>& jumps() const { return jumps_; }
  std::size_t jump_count() const { return jumps_.size(); }
  int value(double s) const;

 private:
  int sign_;
  std::vector<double> jumps_;
};

// Jumps at the sign-changing return times rescaled by ell, initial sign
// that of X at time T.
StepProfile project_to_steps(const PathSample& path, const CrossingConfig& cfg);
StepProfile project_to_steps(const PathSample& path, const CrossingRecord& rec,
                             const CrossingConfig& cfg);

// A function on [0, 1] sampled on a uniform grid including both ends.
struct RescaledPath {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double at(double s) const;  // linear interpolation
};

RescaledPath rescale(const PathSample& path);
RescaledPath sample_profile(const StepProfile& m, std::size_t points);

struct LpDistance {
  double value = 0.0;
  bool resampled = false;  // grids differed; both were put on the finer one
};

LpDistance lp_distance(const RescaledPath& a, const RescaledPath& b, double p);

// Exact L^p distance between two step profiles: 2 |{m != q}|^{1/p}.
double lp_distance(const StepProfile& a, const StepProfile& b, double p);

// Lebesgue measure of {a != b} for two step profiles.
double disagreement(const StepProfile& a, const StepProfile& b);

// L^p distance from m to the closure of M_n, the profiles with at most n
// jumps. An optimal profile keeps a subset of m's jumps, so the search runs
// over both initial signs and all subsets of size <= n.
double dist_to_manifold(const StepProfile& m, std::size_t n, double p);

// (C_W - alpha) |S(m)|
double rate_function(const StepProfile& m, double alpha, double surface_tension = 4.0 / 3.0);

// int_0^1 [X'^2 / (2 ell) + ell W(X)] ds; slopes from forward differences,
// W by the trapezoid rule.
double modica_mortola(const RescaledPath& x, double ell, const Potential& p);

// 1/2 int (X'^2 + U'(X)^2) dt + U(X_T) - U(X_0) with U'^2 = 2W, for samples
// spaced dt apart.
double path_rate(const std::vector<double>& x, double dt, const Potential& p);

// Rescaled sign-changing return times tau_j / lbar.
std::vector<double> extract_point_process(const CrossingRecord& rec, double lbar);

// Counts of events in consecutive unit windows [start + k, start + k + 1)
// that fit inside [start, end).
std::vector<std::size_t> window_counts(const std::vector<double>& events, double start, double end);

struct CrossingRow {
  std::size_t replica;
  std::size_t k;
  std::string kind;  // sigma or tau
  double time;
  double level;
  int sign;
};

std::vector<CrossingRow> crossing_rows(std::size_t replica, const CrossingRecord& rec);

}  // namespace phi4
