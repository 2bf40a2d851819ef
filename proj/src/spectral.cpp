#include "phi4/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phi4/error.hpp"

namespace phi4 {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

// Sign convention: each eigenfunction is positive at its largest entry on
// x >= 0. That makes psi_0 positive and psi_1 positive on the right well.
void fix_sign(const Grid& grid, std::vector<double>& v) {
  std::size_t best = grid.center();
  for (std::size_t i = grid.center(); i < grid.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

void normalize(const Grid& grid, std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s *= grid.spacing();
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : v) x *= inv;
}

// Half-line operator on nodes c + offset .. n-2 (offset 0: even, 1: odd).
SymTridiagonal half_operator(const DiscreteHamiltonian& full, bool even) {
  const std::size_t c = full.grid.center();
  // Interior index of node i is i - 1.
  const std::size_t first = even ? c : c + 1;
  const std::size_t last = full.grid.size() - 2;
  SymTridiagonal t;
  for (std::size_t i = first; i <= last; ++i) t.diag.push_back(full.op.diag[i - 1]);
  for (std::size_t i = first; i < last; ++i) t.off.push_back(full.op.off[i - 1]);
  if (even && !t.off.empty()) t.off[0] *= std::sqrt(2.0);
  return t;
}

std::vector<double> unfold(const Grid& grid, const std::vector<double>& half, bool even) {
  const std::size_t c = grid.center();
  std::vector<double> v(grid.size(), 0.0);
  if (even) {
    v[c] = std::sqrt(2.0) * half[0];
    for (std::size_t j = 1; j < half.size(); ++j) {
      v[c + j] = half[j];
      v[c - j] = half[j];
    }
  } else {
    for (std::size_t j = 0; j < half.size(); ++j) {
      v[c + 1 + j] = half[j];
      v[c - 1 - j] = -half[j];
    }
  }
  return v;
}

SpectralModel make_model(const Potential& p, double beta, const Grid& grid, Spectrum s) {
  SpectralModel m{p, grid, beta, s.values, s.values, std::move(s.vectors), {}, 1, {}};
  m.convergence_order.assign(m.eigenvalues.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < m.eigenfunctions.size(); ++k) fix_sign(grid, m.eigenfunctions[k]);
  if (m.eigenvalues.size() >= 2 && !(m.eigenvalues[1] > m.eigenvalues[0])) {
    throw NumericError("lowest two eigenvalues are not separated on this grid");
  }
  return m;
}

}  // namespace

DiscreteHamiltonian build_hamiltonian(const Potential& p, double beta, const Grid& grid) {
  check_beta(beta);
  const double h = grid.spacing();
  const std::size_t m = grid.size() - 2;
  SymTridiagonal t;
  t.diag.resize(m);
  t.off.assign(m - 1, -1.0 / (2.0 * beta * h * h));
  for (std::size_t j = 0; j < m; ++j) {
    t.diag[j] = 1.0 / (beta * h * h) + beta * p(grid.x(j + 1));
  }
  return DiscreteHamiltonian{grid, beta, std::move(t)};
}

Spectrum solve_lowest(const DiscreteHamiltonian& h, std::size_t count) {
  if (count < 2 || count > h.op.size()) throw DomainError("eigenpair count out of range");
  auto pairs = lowest_eigenpairs(h.op, count);
  Spectrum s;
  s.values = pairs.values;
  for (std::size_t k = 0; k < count; ++k) {
    auto& u = pairs.vectors[k];
    refine_decaying_tail(h.op, pairs.values[k], u);
    std::reverse(u.begin(), u.end());
    SymTridiagonal flipped{{h.op.diag.rbegin(), h.op.diag.rend()}, {h.op.off.rbegin(), h.op.off.rend()}};
    refine_decaying_tail(flipped, pairs.values[k], u);
    std::reverse(u.begin(), u.end());
    std::vector<double> v(h.grid.size(), 0.0);
    std::copy(u.begin(), u.end(), v.begin() + 1);
    normalize(h.grid, v);
    s.vectors.push_back(std::move(v));
  }
  return s;
}

SpectralModel solve_full(const Potential& p, double beta, const Grid& grid, std::size_t count) {
  return make_model(p, beta, grid, solve_lowest(build_hamiltonian(p, beta, grid), count));
}

SpectralModel solve_parity_reduced(const Potential& p, double beta, const Grid& grid,
                                   std::size_t count) {
  if (count < 2) throw DomainError("eigenpair count must be at least 2");
  const auto full = build_hamiltonian(p, beta, grid);
  const std::size_t n_even = (count + 1) / 2;
  const std::size_t n_odd = count / 2;
  const auto even_op = half_operator(full, true);
  const auto odd_op = half_operator(full, false);
  if (n_even > even_op.size() || n_odd > odd_op.size()) {
    throw DomainError("eigenpair count exceeds the half-grid size");
  }
  auto even = lowest_eigenpairs(even_op, n_even);
  auto odd = lowest_eigenpairs(odd_op, n_odd);
  Spectrum s;
  for (std::size_t k = 0; k < count; ++k) {
    const bool is_even = (k % 2 == 0);
    auto& pairs = is_even ? even : odd;
    const auto& op = is_even ? even_op : odd_op;
    const std::size_t j = k / 2;
    refine_decaying_tail(op, pairs.values[j], pairs.vectors[j]);
    auto v = unfold(grid, pairs.vectors[j], is_even);
    normalize(grid, v);
    s.values.push_back(pairs.values[j]);
    s.vectors.push_back(std::move(v));
  }
  // Interleaving by parity assumes E_0 < E_1 < E_2 < ...; the two sectors
  // alternate for a symmetric double well, check it anyway.
  for (std::size_t k = 1; k < count; ++k) {
    if (!(s.values[k] >= s.values[k - 1])) {
      std::ostringstream os;
      os << "parity sectors do not interlace at eigenvalue index " << k;
      throw NumericError(os.str());
    }
  }
  return make_model(p, beta, grid, std::move(s));
}

SpectralModel refine_extrapolate(const Potential& p, double beta, const Grid& base,
                                 std::size_t levels, std::size_t count, SolveMethod method) {
  if (levels < 2) throw DomainError("extrapolation needs at least two levels");
  std::vector<std::vector<double>> raw;
  Grid grid = base;
  SpectralModel finest = method == SolveMethod::parity ? solve_parity_reduced(p, beta, grid, count)
                                                       : solve_full(p, beta, grid, count);
  raw.push_back(finest.eigenvalues);
  for (std::size_t l = 1; l < levels; ++l) {
    grid = grid.refined();
    finest = method == SolveMethod::parity ? solve_parity_reduced(p, beta, grid, count)
                                           : solve_full(p, beta, grid, count);
    raw.push_back(finest.eigenvalues);
  }
  SpectralModel m = std::move(finest);
  m.levels = levels;
  for (std::size_t k = 0; k < count; ++k) {
    // Richardson tableau in h^2.
    std::vector<std::vector<double>> r(levels);
    for (std::size_t j = 0; j < levels; ++j) {
      r[j].resize(j + 1);
      r[j][0] = raw[j][k];
      double factor = 4.0;
      for (std::size_t q = 1; q <= j; ++q, factor *= 4.0) {
        r[j][q] = r[j][q - 1] + (r[j][q - 1] - r[j - 1][q - 1]) / (factor - 1.0);
      }
    }
    m.eigenvalues[k] = r[levels - 1][levels - 1];
    if (levels >= 3) {
      const double d1 = raw[levels - 3][k] - raw[levels - 2][k];
      const double d2 = raw[levels - 2][k] - raw[levels - 1][k];
      const double scale = std::abs(raw[levels - 1][k]) + 1.0;
      if (std::abs(d2) > 1e-13 * scale && d1 / d2 > 0.0) {
        m.convergence_order[k] = std::log2(d1 / d2);
        if (m.convergence_order[k] < 1.5 || m.convergence_order[k] > 2.5) {
          std::ostringstream os;
          os << "eigenvalue " << k << ": empirical convergence order " << m.convergence_order[k]
             << " outside [1.5, 2.5], grid may be under-resolved";
          m.warnings.push_back(os.str());
        }
      } else if (std::abs(d2) > 1e-13 * scale) {
        std::ostringstream os;
        os << "eigenvalue " << k << ": non-monotone refinement sequence";
        m.warnings.push_back(os.str());
      }
    }
  }
  return m;
}

SpectralModel default_model(const Potential& p, double beta, std::size_t count) {
  const double h = beta < 8.0 ? 0.004 : 0.002;
  return refine_extrapolate(p, beta, Grid::with_spacing(2.5, h), 2, count);
}

double spectral_gap(const SpectralModel& m) {
  if (m.count() < 2) throw DomainError("gap needs at least two eigenvalues");
  return m.eigenvalues[1] - m.eigenvalues[0];
}

EffectivePotential effective_potential(const SpectralModel& m) {
  const std::size_t n = m.grid.size();
  const auto& psi = m.eigenfunctions.at(0);
  EffectivePotential u;
  u.value.assign(n, std::numeric_limits<double>::quiet_NaN());
  u.slope.assign(n, std::numeric_limits<double>::quiet_NaN());
  u.valid.assign(n, 0);
  const double floor = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (psi[i] > floor && std::isfinite(psi[i])) {
      u.valid[i] = 1;
      u.value[i] = -std::log(psi[i]) / m.beta;
      lowest = std::min(lowest, u.value[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (u.valid[i]) {
      u.value[i] -= lowest;
    } else {
      ++u.masked;
    }
  }
  const double h = m.grid.spacing();
  for (std::size_t i = 0; i < n; ++i) {
    if (!u.valid[i]) continue;
    const bool left = i > 0 && u.valid[i - 1];
    const bool right = i + 1 < n && u.valid[i + 1];
    if (left && right) {
      u.slope[i] = (u.value[i + 1] - u.value[i - 1]) / (2.0 * h);
    } else if (right) {
      u.slope[i] = (u.value[i + 1] - u.value[i]) / h;
    } else if (left) {
      u.slope[i] = (u.value[i] - u.value[i - 1]) / h;
    }
  }
  return u;
}

double riccati_residual(const SpectralModel& m) {
  const auto u = effective_potential(m);
  const double h = m.grid.spacing();
  const double e0 = m.grid_eigenvalues.at(0);
  const double limit = m.grid.half_width() - 0.5;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < m.grid.size(); ++i) {
    const double x = m.grid.x(i);
    if (std::abs(x) > limit + 1e-12) continue;
    if (!u.valid[i - 1] || !u.valid[i] || !u.valid[i + 1]) {
      throw NumericError("ground state underflows inside the Riccati window");
    }
    const double du = (u.value[i + 1] - u.value[i - 1]) / (2.0 * h);
    const double d2u = (u.value[i + 1] - 2.0 * u.value[i] + u.value[i - 1]) / (h * h);
    const double r = 0.5 * du * du - d2u / (2.0 * m.beta) - m.potential(x) + e0 / m.beta;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

Matrix heat_kernel(const SpectralModel& m, double t, std::size_t truncation) {
  if (!(t > 0.0)) throw DomainError("heat kernel time must be positive");
  const std::size_t kmax = std::min(truncation, m.eigenfunctions.size());
  const std::size_t n = m.grid.size();
  Matrix g(n, n);
  const double e0 = m.grid_eigenvalues[0];
  for (std::size_t k = 0; k < kmax; ++k) {
    const double w = std::exp(-t * (m.grid_eigenvalues[k] - e0));
    const auto& psi = m.eigenfunctions[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double a = w * psi[i];
      double* gi = g.row(i);
      for (std::size_t j = i; j < n; ++j) gi[j] += a * psi[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

double grid_inner(const SpectralModel& m, const std::vector<double>& f, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * m.grid.spacing();
}

}  // namespace phi4
