#include "phi4/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "phi4/error.hpp"
#include "phi4/quadrature.hpp"

namespace phi4 {

SemiclassicalConstants semiclassical_constants(const Potential& p) {
  return SemiclassicalConstants{surface_tension(p), tunneling_prefactor(p),
                                std::sqrt(p.curvature_at_well())};
}

double harmonic_level(std::size_t k, const Potential& p) {
  return (static_cast<double>(k) + 0.5) * std::sqrt(p.curvature_at_well());
}

double harmonic_level(std::size_t k) { return harmonic_level(k, quartic_potential()); }

GaussianApproximants gaussian_approximants(double beta, const Grid& grid, const Potential& p) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double omega = std::sqrt(p.curvature_at_well());
  const double norm = std::pow(beta * omega / std::numbers::pi, 0.25);
  const std::size_t n = grid.size();
  GaussianApproximants g;
  g.plus.resize(n);
  g.minus.resize(n);
  g.even.resize(n);
  g.odd.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    g.plus[i] = norm * std::exp(-0.5 * beta * omega * (x - 1.0) * (x - 1.0));
    g.minus[i] = norm * std::exp(-0.5 * beta * omega * (x + 1.0) * (x + 1.0));
  }
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g.even[i] = (g.plus[i] + g.minus[i]) / std::sqrt(2.0);
    g.odd[i] = (g.plus[i] - g.minus[i]) / std::sqrt(2.0);
    s0 += g.even[i] * g.even[i];
    s1 += g.odd[i] * g.odd[i];
  }
  g.z0 = std::sqrt(s0 * grid.spacing());
  g.z1 = std::sqrt(s1 * grid.spacing());
  for (std::size_t i = 0; i < n; ++i) {
    g.even[i] /= g.z0;
    g.odd[i] /= g.z1;
  }
  return g;
}

double tunneling_integrand(const Potential& p, double x) {
  const double w = p.eval(x);
  return (p.deriv1(x) + std::sqrt(2.0 * p.curvature_at_well() * std::max(w, 0.0))) / (2.0 * w);
}

double tunneling_prefactor(const Potential& p) {
  validate_double_well(p);
  // The exponent integrand is 0/0 at the well; insist on a finite limit.
  double prev = tunneling_integrand(p, 1.0 - 1e-2);
  for (int k = 3; k <= 6; ++k) {
    const double cur = tunneling_integrand(p, 1.0 - std::pow(10.0, -k));
    if (!std::isfinite(cur) || std::abs(cur - prev) > 0.1 * (1.0 + std::abs(prev))) {
      throw NumericError(p.name() + ": prefactor integrand has no finite limit at the well");
    }
    prev = cur;
  }
  const double exponent = integrate([&p](double x) { return tunneling_integrand(p, x); }, 0.0, 1.0);
  const double omega = std::sqrt(p.curvature_at_well());
  return 2.0 * std::sqrt(2.0) / std::sqrt(std::numbers::pi) * std::sqrt(p.eval(0.0) * omega) *
         std::exp(exponent);
}

double predicted_gap(double beta, const Potential& p) {
  const auto c = semiclassical_constants(p);
  return c.prefactor * std::sqrt(beta) * std::exp(-beta * c.surface_tension);
}

double critical_length(double beta, const Potential& p) {
  const auto c = semiclassical_constants(p);
  return 2.0 / (c.prefactor * std::sqrt(beta)) * std::exp(beta * c.surface_tension);
}

double grid_integral(const Grid& grid, const std::vector<double>& f, double a, double b) {
  const double h = grid.spacing();
  const double tol = 1e-9 * h;
  double sum = 0.0;
  std::size_t first = grid.size(), last = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    if (x < a - tol || x > b + tol) continue;
    first = std::min(first, i);
    last = std::max(last, i);
    sum += f[i];
  }
  if (first > last) return 0.0;
  sum -= 0.5 * (f[first] + f[last]);
  return sum * h;
}

SemiclassicalReport semiclassical_report(const SpectralModel& m) {
  if (m.count() < 4) throw DomainError("semiclassical report needs at least four eigenpairs");
  const auto& p = m.potential;
  const auto c = semiclassical_constants(p);
  const double beta = m.beta;
  SemiclassicalReport r;
  r.beta = beta;
  r.energies = m.eigenvalues;
  for (std::size_t k = 0; k < m.count(); ++k) r.harmonic_levels.push_back(c.harmonic_level(k / 2));
  r.gap = spectral_gap(m);
  r.predicted_gap = c.prefactor * std::sqrt(beta) * std::exp(-beta * c.surface_tension);
  r.gap_ratio = r.gap / r.predicted_gap;
  r.critical_length = 2.0 / r.predicted_gap;

  const auto& psi0 = m.eigenfunctions[0];
  const auto& psi1 = m.eigenfunctions[1];
  const auto g = gaussian_approximants(beta, m.grid, p);
  for (int k = 0; k < 2; ++k) {
    const auto& psi = m.eigenfunctions[k];
    const auto& gk = k == 0 ? g.even : g.odd;
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += (psi[i] - gk[i]) * (psi[i] - gk[i]);
    r.gaussian_deviation[k] = beta * s * m.grid.spacing();
  }

  std::vector<double> prod(psi0.size());
  for (std::size_t i = 0; i < psi0.size(); ++i) prod[i] = psi0[i] * psi1[i];
  const double wells[2] = {1.0, -1.0};
  for (int s = 0; s < 2; ++s) {
    const double a = wells[s] - 0.5, b = wells[s] + 0.5;
    r.well_integral_psi0[s] = grid_integral(m.grid, psi0, a, b);
    r.well_integral_psi1[s] = grid_integral(m.grid, psi1, a, b);
    r.overlap_psi0_psi1[s] = grid_integral(m.grid, prod, a, b);
  }
  r.right_half_psi0 = grid_integral(m.grid, psi0, 0.5, m.grid.half_width());
  r.well_integral_target = std::pow(std::numbers::pi / (beta * c.omega), 0.25);
  r.total_integral_psi1 = grid_integral(m.grid, psi1, -m.grid.half_width(), m.grid.half_width());

  double sup = 0.0;
  for (std::size_t i = m.grid.center(); i < m.grid.size(); ++i) {
    sup = std::max(sup, psi0[i] * std::abs(psi0[i] - psi1[i]));
  }
  r.splitting_ratio = sup / (std::pow(beta, 1.5) * r.gap);

  const double at2 = psi0[m.grid.nearest(2.0)];
  r.decay_rate = at2 > 0.0 ? -std::log(at2) / (2.0 * beta) : std::numeric_limits<double>::infinity();
  r.warnings = m.warnings;
  return r;
}

}  // namespace phi4
