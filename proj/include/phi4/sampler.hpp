#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "phi4/matrix.hpp"
#include "phi4/rng.hpp"
#include "phi4/spectral.hpp"

namespace phi4 {

// psi_0^2 on the grid (a density: sum_i pi_i h = 1).
std::vector<double> stationary_density(const SpectralModel& m);

// Single-level parity-reduced model on the grid used for path sampling
// (R = 2.5, spacing h).
SpectralModel sampling_model(const Potential& p, double beta, double spacing = 0.005,
                             std::size_t count = 8);

// One-step law P = exp(dt L) of the grid chain with generator
// L(i, i+-1) = a psi0(i+-1) / psi0(i), a = 1 / (2 beta h^2), and zero row
// sums. This is -psi0^{-1} (H - E_0) psi0 with the diagonal replaced by the
// negative off-diagonal row sum, which differs from the discrete one only by
// the eigenvector residual. The exponential is computed by uniformization,
// so every entry is a sum of nonnegative terms.
class TransitionKernel {
 public:
  TransitionKernel(std::shared_ptr<const SpectralModel> model, double dt);
  TransitionKernel(const SpectralModel& model, double dt);

  const SpectralModel& model() const { return *model_; }
  double dt() const { return dt_; }
  std::size_t size() const { return p_.rows(); }
  const Matrix& matrix() const { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return p_(i, j); }

  // Stationary masses psi0(x_i)^2 h; zero at the two Dirichlet nodes.
  const std::vector<double>& stationary() const { return pi_; }

  // Columns [support_begin(i), support_end(i)) hold the entries kept for
  // sampling (> 1e-18); the dropped mass is at most trimmed_mass().
  std::size_t support_begin(std::size_t i) const { return begin_[i]; }
  std::size_t support_end(std::size_t i) const { return end_[i]; }
  double trimmed_mass() const { return trimmed_; }

  std::size_t sample_next(std::size_t i, Rng& rng) const;
  std::size_t sample_stationary(Rng& rng) const;

  // Outermost interior nodes; visiting them counts as boundary leakage.
  bool is_leak_node(std::size_t i) const { return i <= 1 || i + 2 >= size(); }

 private:
  void build_tables();

  std::shared_ptr<const SpectralModel> model_;
  double dt_;
  Matrix p_;
  std::vector<double> pi_;
  std::vector<std::size_t> begin_, end_, offset_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> pi_prob_;
  std::vector<std::uint32_t> pi_alias_;
  double trimmed_ = 0.0;
};

// Walker/Vose alias table over weights (need not be normalized).
struct AliasTable {
  std::vector<double> prob;
  std::vector<std::uint32_t> alias;

  explicit AliasTable(const std::vector<double>& weights);
  AliasTable() = default;
  std::size_t sample(Rng& rng) const;
};

enum class BoundaryKind : std::uint8_t { stationary = 0, free = 1, sde = 2 };

std::string to_string(BoundaryKind kind);

struct PathSample {
  BoundaryKind kind = BoundaryKind::stationary;
  double beta = 0.0;
  double dt = 0.0;
  double length = 0.0;
  std::uint64_t seed = 0;
  double grid_half_width = 0.0;
  std::uint32_t grid_points = 0;
  std::vector<std::uint16_t> nodes;  // chain paths only
  std::vector<double> values;
  std::size_t leakage = 0;

  std::size_t size() const { return values.size(); }
  double time(std::size_t j) const { return static_cast<double>(j) * dt; }
};

std::size_t step_count(double length, double dt);

PathSample sample_stationary_path(const TransitionKernel& k, double length, Rng& rng,
                                  std::uint64_t seed = 0);

// Exact sampler for the grid version of the free-boundary path measure.
// Writing M = exp(-dt (H - E_0)) and psi = psi0, the probability of a node
// sequence i_0..i_N is proportional to 1' M^N 1 expanded along the path,
// i.e. psi(i_0) prod P(i_j, i_{j+1}) / psi(i_N). This is the chain
// h-transformed by phi_r = P^r (1/psi): with r steps remaining the step law
// is P(x, y) phi_{r-1}(y) / phi_r(x), and X_0 has law proportional to
// psi^2 phi_N / psi = psi phi_N. phi_r psi equals the spectral
// h_{r dt} = sum_k exp(-r dt (E_k - E_0)) c_k psi_k.
class FreeBoundarySampler {
 public:
  explicit FreeBoundarySampler(std::shared_ptr<const TransitionKernel> kernel);

  const TransitionKernel& kernel() const { return *kernel_; }
  // Number of tabulated phi_r; beyond it phi_r is constant to ~1e-13 on the
  // reachable nodes and the plain chain is used.
  std::size_t table_depth() const { return phi_.size(); }
  const std::vector<double>& phi(std::size_t r) const;

  // Law of X_0 for a path with `steps` steps (masses summing to 1).
  std::vector<double> initial_law(std::size_t steps) const;

  PathSample sample(double length, Rng& rng, std::uint64_t seed = 0) const;

 private:
  std::shared_ptr<const TransitionKernel> kernel_;
  std::vector<std::vector<double>> phi_;
};

// h_t(x) = sum_{k<K} exp(-t (E_k - E_0)) c_k psi_k(x), c_k = sum_i psi_k(x_i) h.
std::vector<double> spectral_h(const SpectralModel& m, double t, std::size_t truncation);
std::vector<double> spectral_coefficients(const SpectralModel& m);

struct EulerMaruyamaOptions {
  double noise_scale = 1.0;  // 0 gives the deterministic gradient flow
};

// Explicit Euler-Maruyama for dX = -U_beta'(X) dt + sqrt(1/beta) dw with
// the drift linearly interpolated between nodes and X clamped to [-R, R].
PathSample euler_maruyama_path(const SpectralModel& m, double x0, double length, double dt,
                               Rng& rng, const EulerMaruyamaOptions& opts = {},
                               std::uint64_t seed = 0);

// Interpolated drift -U_beta'(x) used by euler_maruyama_path. Outside
// |x| <= R - 1/2 the drift is held at its value at the window edge.
class DriftField {
 public:
  explicit DriftField(const SpectralModel& m);
  double operator()(double x) const;
  double max_slope() const { return max_slope_; }

 private:
  double lo_, h_;
  std::vector<double> drift_;
  double max_slope_ = 0.0;
};

// One Euler-Maruyama step at a time; owns its normal generator state.
class EulerMaruyamaStepper {
 public:
  EulerMaruyamaStepper(std::shared_ptr<const DriftField> drift, double beta, double half_width,
                       double dt, const EulerMaruyamaOptions& opts = {});

  double dt() const { return dt_; }
  // Throws NumericError if the unclamped step leaves [-R-1, R+1].
  double step(double x, Rng& rng);

 private:
  std::shared_ptr<const DriftField> drift_;
  double r_, dt_, noise_;
  std::normal_distribution<double> normal_;
};

struct EndpointDensities {
  Matrix rho;      // law of (X_T, X_{l-T}) under the free-boundary measure
  Matrix rho_bar;  // psi0(x) g_{l-2T}(x, y) psi0(y), normalized
  std::vector<double> q;  // g_T(0, x) psi0(x) / psi0(0), normalized
  double tail_bound = 0.0;  // exp(-min(T, l-2T) (E_K - E_0)) for the truncated series
};

EndpointDensities endpoint_densities(const SpectralModel& m, double length, double T,
                                     std::size_t truncation);

// Endpoint-marginal-only variant (skips the two n x n matrices).
std::vector<double> half_line_marginal(const SpectralModel& m, double T, std::size_t truncation);

double total_variation(const std::vector<double>& p, const std::vector<double>& q, double weight);
double total_variation(const Matrix& p, const Matrix& q, double weight);

}  // namespace phi4
