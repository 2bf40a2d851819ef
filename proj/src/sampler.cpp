#include "phi4/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phi4/error.hpp"

namespace phi4 {

namespace {

constexpr double kKeepThreshold = 1e-18;
constexpr double kMaxUniformRate = 64.0;

// exp(dt L) for the birth-death generator given by its two off-diagonals
// (up[i] = L(i, i+1), down[i] = L(i, i-1)), restricted to nodes
// [first, last]. Uniformization: P = sum_k Pois(k; q dt) B^k, B = I + L/q.
Matrix uniformized_exponential(const std::vector<double>& up, const std::vector<double>& down,
                               std::size_t first, std::size_t last, std::size_t n, double dt) {
  double q = 0.0;
  for (std::size_t i = first; i <= last; ++i) q = std::max(q, up[i] + down[i]);
  const double rate = q * dt;
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < first || i > last) p(i, i) = 1.0;
  }
  if (rate == 0.0) {
    for (std::size_t i = first; i <= last; ++i) p(i, i) = 1.0;
    return p;
  }
  // B as three diagonals; entries are in [0, 1].
  std::vector<double> bu(n, 0.0), bd(n, 0.0), bc(n, 1.0);
  for (std::size_t i = first; i <= last; ++i) {
    bu[i] = up[i] / q;
    bd[i] = down[i] / q;
    bc[i] = 1.0 - bu[i] - bd[i];
  }
  std::vector<double> weights;
  double w = std::exp(-rate);
  double acc = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k > 0) w *= rate / static_cast<double>(k);
    weights.push_back(w);
    acc += w;
    if (static_cast<double>(k) > rate && (w < 1e-20 || 1.0 - acc < 1e-17)) break;
    if (k > 100000) throw NumericError("uniformization series did not terminate");
  }
  std::vector<double> v(n), next(n);
  for (std::size_t i = first; i <= last; ++i) {
    std::fill(v.begin(), v.end(), 0.0);
    v[i] = 1.0;
    std::size_t lo = i, hi = i;
    double* row = p.row(i);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      for (std::size_t j = lo; j <= hi; ++j) row[j] += weights[k] * v[j];
      if (k + 1 == weights.size()) break;
      // next = v B (row vector times matrix)
      const std::size_t nlo = lo > first ? lo - 1 : lo;
      const std::size_t nhi = hi < last ? hi + 1 : hi;
      for (std::size_t j = nlo; j <= nhi; ++j) {
        double s = v[j] * bc[j];
        if (j > first) s += v[j - 1] * bu[j - 1];
        if (j < last) s += v[j + 1] * bd[j + 1];
        next[j] = s;
      }
      for (std::size_t j = nlo; j <= nhi; ++j) v[j] = next[j];
      lo = nlo;
      hi = nhi;
    }
    double sum = 0.0;
    for (std::size_t j = first; j <= last; ++j) sum += row[j];
    for (std::size_t j = first; j <= last; ++j) row[j] /= sum;
  }
  return p;
}

}  // namespace

std::vector<double> stationary_density(const SpectralModel& m) {
  const auto& psi = m.eigenfunctions.at(0);
  std::vector<double> pi(psi.size());
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    pi[i] = psi[i] * psi[i];
    s += pi[i];
  }
  s *= m.grid.spacing();
  for (double& x : pi) x /= s;
  return pi;
}

SpectralModel sampling_model(const Potential& p, double beta, double spacing, std::size_t count) {
  return solve_parity_reduced(p, beta, Grid::with_spacing(2.5, spacing), count);
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t m = weights.size();
  if (m == 0) throw DomainError("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("alias weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("alias weights sum to zero");
  prob.assign(m, 0.0);
  alias.assign(m, 0);
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = weights[i] * static_cast<double>(m) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob[s] = scaled[s];
    alias[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob[i] = 1.0;
    alias[i] = i;
  }
  for (auto i : small) {
    prob[i] = 1.0;
    alias[i] = i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const double u = uniform01(rng) * static_cast<double>(prob.size());
  const auto j = std::min(static_cast<std::size_t>(u), prob.size() - 1);
  return (u - static_cast<double>(j)) < prob[j] ? j : alias[j];
}

TransitionKernel::TransitionKernel(const SpectralModel& model, double dt)
    : TransitionKernel(std::make_shared<const SpectralModel>(model), dt) {}

TransitionKernel::TransitionKernel(std::shared_ptr<const SpectralModel> model, double dt)
    : model_(std::move(model)), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  const auto& m = *model_;
  const std::size_t n = m.grid.size();
  if (n > 65535) throw DomainError("grid too large for 16-bit node indices");
  const auto& psi = m.eigenfunctions.at(0);
  const double h = m.grid.spacing();
  const double a = 1.0 / (2.0 * m.beta * h * h);
  const std::size_t first = 1, last = n - 2;
  for (std::size_t i = first; i <= last; ++i) {
    if (!(psi[i] > 0.0)) {
      std::ostringstream os;
      os << "ground state not positive at node " << i << "; cannot build the chain";
      throw NumericError(os.str());
    }
  }
  std::vector<double> up(n, 0.0), down(n, 0.0);
  for (std::size_t i = first; i <= last; ++i) {
    if (i < last) up[i] = a * psi[i + 1] / psi[i];
    if (i > first) down[i] = a * psi[i - 1] / psi[i];
  }
  double q = 0.0;
  for (std::size_t i = first; i <= last; ++i) q = std::max(q, up[i] + down[i]);
  int squarings = 0;
  double step = dt;
  while (q * step > kMaxUniformRate) {
    step *= 0.5;
    ++squarings;
  }
  p_ = uniformized_exponential(up, down, first, last, n, step);
  for (int s = 0; s < squarings; ++s) p_ = multiply(p_, p_);

  pi_.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    pi_[i] = psi[i] * psi[i];
    total += pi_[i];
  }
  for (double& x : pi_) x /= total;
  build_tables();
}

void TransitionKernel::build_tables() {
  const std::size_t n = size();
  begin_.assign(n, 0);
  end_.assign(n, 0);
  offset_.assign(n + 1, 0);
  prob_.clear();
  alias_.clear();
  trimmed_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = p_.row(i);
    std::size_t b = 0, e = n;
    while (b < n && row[b] <= kKeepThreshold) ++b;
    while (e > b && row[e - 1] <= kKeepThreshold) --e;
    if (b >= e) throw NumericError("transition kernel row has no mass");
    double dropped = 0.0;
    for (std::size_t j = 0; j < b; ++j) dropped += row[j];
    for (std::size_t j = e; j < n; ++j) dropped += row[j];
    trimmed_ = std::max(trimmed_, dropped);
    begin_[i] = b;
    end_[i] = e;
    AliasTable t(std::vector<double>(row + b, row + e));
    offset_[i] = prob_.size();
    prob_.insert(prob_.end(), t.prob.begin(), t.prob.end());
    alias_.insert(alias_.end(), t.alias.begin(), t.alias.end());
  }
  offset_[n] = prob_.size();
  AliasTable s(pi_);
  pi_prob_ = std::move(s.prob);
  pi_alias_ = std::move(s.alias);
}

std::size_t TransitionKernel::sample_next(std::size_t i, Rng& rng) const {
  const std::size_t width = end_[i] - begin_[i];
  const double u = uniform01(rng) * static_cast<double>(width);
  const auto j = std::min(static_cast<std::size_t>(u), width - 1);
  const std::size_t at = offset_[i] + j;
  const std::size_t local = (u - static_cast<double>(j)) < prob_[at] ? j : alias_[at];
  return begin_[i] + local;
}

std::size_t TransitionKernel::sample_stationary(Rng& rng) const {
  const double u = uniform01(rng) * static_cast<double>(pi_prob_.size());
  const auto j = std::min(static_cast<std::size_t>(u), pi_prob_.size() - 1);
  return (u - static_cast<double>(j)) < pi_prob_[j] ? j : pi_alias_[j];
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::stationary:
      return "stationary";
    case BoundaryKind::free:
      return "free";
    case BoundaryKind::sde:
      return "sde";
  }
  return "unknown";
}

std::size_t step_count(double length, double dt) {
  if (!(length >= dt) || !(dt > 0.0)) throw DomainError("path length must be at least dt");
  return static_cast<std::size_t>(std::ceil(length / dt - 1e-9));
}

namespace {

PathSample chain_header(const TransitionKernel& k, BoundaryKind kind, double length,
                        std::uint64_t seed) {
  PathSample s;
  s.kind = kind;
  s.beta = k.model().beta;
  s.dt = k.dt();
  s.length = length;
  s.seed = seed;
  s.grid_half_width = k.model().grid.half_width();
  s.grid_points = static_cast<std::uint32_t>(k.size());
  return s;
}

void push_node(PathSample& s, const TransitionKernel& k, std::size_t i) {
  s.nodes.push_back(static_cast<std::uint16_t>(i));
  s.values.push_back(k.model().grid.x(i));
  if (k.is_leak_node(i)) ++s.leakage;
}

}  // namespace

PathSample sample_stationary_path(const TransitionKernel& k, double length, Rng& rng,
                                  std::uint64_t seed) {
  const std::size_t steps = step_count(length, k.dt());
  PathSample s = chain_header(k, BoundaryKind::stationary, length, seed);
  s.nodes.reserve(steps + 1);
  s.values.reserve(steps + 1);
  std::size_t i = k.sample_stationary(rng);
  push_node(s, k, i);
  for (std::size_t j = 0; j < steps; ++j) {
    i = k.sample_next(i, rng);
    push_node(s, k, i);
  }
  return s;
}

FreeBoundarySampler::FreeBoundarySampler(std::shared_ptr<const TransitionKernel> kernel)
    : kernel_(std::move(kernel)) {
  const auto& k = *kernel_;
  const auto& psi = k.model().eigenfunctions.at(0);
  const std::size_t n = k.size();
  double peak = 0.0;
  for (double v : psi) peak = std::max(peak, v * v);
  std::vector<char> reachable(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) reachable[i] = psi[i] * psi[i] >= 1e-20 * peak;
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) phi[i] = 1.0 / psi[i];
  // phi_r is even on the symmetric grid. Roundoff feeds the odd mode, which
  // only decays at the tunnelling rate and would settle near 1e-16 / (dt gap),
  // so each iterate is projected back onto even functions.
  const std::size_t cap = 50000;
  const auto& p = k.matrix();
  for (std::size_t r = 0;; ++r) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!reachable[i]) continue;
      lo = std::min(lo, phi[i]);
      hi = std::max(hi, phi[i]);
    }
    phi_.push_back(phi);
    if (hi - lo <= 1e-13 * hi) break;
    if (r > cap) throw NumericError("free-boundary weights did not equilibrate");
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k.support_begin(i); j < k.support_end(i); ++j) s += p(i, j) * phi[j];
      next[i] = s;
    }
    for (std::size_t i = 1; 2 * i < n; ++i) {
      const double even = 0.5 * (next[i] + next[n - 1 - i]);
      next[i] = next[n - 1 - i] = even;
    }
    phi.swap(next);
  }
}

const std::vector<double>& FreeBoundarySampler::phi(std::size_t r) const {
  return phi_[std::min(r, phi_.size() - 1)];
}

std::vector<double> FreeBoundarySampler::initial_law(std::size_t steps) const {
  const auto& psi = kernel_->model().eigenfunctions[0];
  const auto& f = phi(steps);
  std::vector<double> w(psi.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    w[i] = psi[i] * f[i];
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

PathSample FreeBoundarySampler::sample(double length, Rng& rng, std::uint64_t seed) const {
  const auto& k = *kernel_;
  const std::size_t steps = step_count(length, k.dt());
  PathSample s = chain_header(k, BoundaryKind::free, length, seed);
  s.nodes.reserve(steps + 1);
  s.values.reserve(steps + 1);
  std::size_t i = AliasTable(initial_law(steps)).sample(rng);
  push_node(s, k, i);
  const auto& p = k.matrix();
  const std::size_t depth = phi_.size();
  for (std::size_t j = 0; j < steps; ++j) {
    const std::size_t remaining = steps - j;  // steps left before this move
    if (remaining - 1 >= depth - 1) {
      i = k.sample_next(i, rng);
    } else {
      const auto& f = phi_[remaining - 1];
      const std::size_t b = k.support_begin(i), e = k.support_end(i);
      double total = 0.0;
      for (std::size_t y = b; y < e; ++y) total += p(i, y) * f[y];
      double u = uniform01(rng) * total;
      std::size_t next = e - 1;
      for (std::size_t y = b; y < e; ++y) {
        u -= p(i, y) * f[y];
        if (u < 0.0) {
          next = y;
          break;
        }
      }
      i = next;
    }
    push_node(s, k, i);
  }
  return s;
}

std::vector<double> spectral_coefficients(const SpectralModel& m) {
  std::vector<double> c;
  for (const auto& psi : m.eigenfunctions) {
    double s = 0.0;
    for (double v : psi) s += v;
    c.push_back(s * m.grid.spacing());
  }
  return c;
}

std::vector<double> spectral_h(const SpectralModel& m, double t, std::size_t truncation) {
  const auto c = spectral_coefficients(m);
  const std::size_t kmax = std::min(truncation, m.eigenfunctions.size());
  std::vector<double> h(m.grid.size(), 0.0);
  for (std::size_t k = 0; k < kmax; ++k) {
    const double w = std::exp(-t * (m.grid_eigenvalues[k] - m.grid_eigenvalues[0])) * c[k];
    const auto& psi = m.eigenfunctions[k];
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += w * psi[i];
  }
  return h;
}

DriftField::DriftField(const SpectralModel& m)
    : lo_(-m.grid.half_width()), h_(m.grid.spacing()) {
  const auto u = effective_potential(m);
  const std::size_t n = m.grid.size();
  drift_.assign(n, 0.0);
  // Within h of the Dirichlet ends psi0 vanishes linearly and the slope of
  // -U_beta' grows like 1 / (beta (R - |x|)^2); that layer is an artifact of
  // the truncation, so the drift is frozen outside |x| <= R - 1/2.
  const double window = m.grid.half_width() - 0.5;
  std::size_t first_valid = n, last_valid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u.valid[i] && std::abs(m.grid.x(i)) <= window) {
      first_valid = std::min(first_valid, i);
      last_valid = std::max(last_valid, i);
    }
  }
  if (first_valid > last_valid) throw NumericError("no valid nodes for the drift");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = std::clamp(i, first_valid, last_valid);
    drift_[i] = u.valid[src] ? u.drift(src) : 0.0;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    max_slope_ = std::max(max_slope_, std::abs(drift_[i + 1] - drift_[i]) / h_);
  }
}

double DriftField::operator()(double x) const {
  const double pos = (x - lo_) / h_;
  if (pos <= 0.0) return drift_.front();
  const double last = static_cast<double>(drift_.size() - 1);
  if (pos >= last) return drift_.back();
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * drift_[i] + f * drift_[i + 1];
}

EulerMaruyamaStepper::EulerMaruyamaStepper(std::shared_ptr<const DriftField> drift, double beta,
                                           double half_width, double dt,
                                           const EulerMaruyamaOptions& opts)
    : drift_(std::move(drift)), r_(half_width), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(dt * drift_->max_slope() < 1.0)) {
    throw DomainError("dt too large for the drift: dt * max|drift'| must stay below 1");
  }
  noise_ = opts.noise_scale * std::sqrt(dt / beta);
}

double EulerMaruyamaStepper::step(double x, Rng& rng) {
  x += (*drift_)(x) * dt_;
  if (noise_ != 0.0) x += noise_ * normal_(rng);
  if (!std::isfinite(x) || std::abs(x) > r_ + 1.0) {
    throw NumericError("Euler-Maruyama path left [-R-1, R+1]; reduce dt");
  }
  return std::clamp(x, -r_, r_);
}

PathSample euler_maruyama_path(const SpectralModel& m, double x0, double length, double dt,
                               Rng& rng, const EulerMaruyamaOptions& opts, std::uint64_t seed) {
  const double r = m.grid.half_width();
  EulerMaruyamaStepper stepper(std::make_shared<const DriftField>(m), m.beta, r, dt, opts);
  if (std::abs(x0) > r) throw DomainError("x0 outside the grid");
  const std::size_t steps = step_count(length, dt);
  PathSample s;
  s.kind = BoundaryKind::sde;
  s.beta = m.beta;
  s.dt = dt;
  s.length = length;
  s.seed = seed;
  s.grid_half_width = r;
  s.grid_points = static_cast<std::uint32_t>(m.grid.size());
  s.values.reserve(steps + 1);
  double x = x0;
  s.values.push_back(x);
  for (std::size_t j = 0; j < steps; ++j) {
    x = stepper.step(x, rng);
    s.values.push_back(x);
  }
  return s;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q, double weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s * weight;
}

double total_variation(const Matrix& p, const Matrix& q, double weight) {
  return total_variation(p.data(), q.data(), weight);
}

}  // namespace phi4
