#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phi4/grid.hpp"
#include "phi4/potential.hpp"
#include "phi4/spectral.hpp"

namespace phi4 {

struct SemiclassicalConstants {
  double surface_tension;  // C_W
  double prefactor;        // A_W
  double omega;            // sqrt(W''(1))

  double harmonic_level(std::size_t k) const { return (static_cast<double>(k) + 0.5) * omega; }
};

SemiclassicalConstants semiclassical_constants(const Potential& p);

// (k + 1/2) sqrt(W''(1)); 2k + 1 for the quartic well.
double harmonic_level(std::size_t k, const Potential& p);
double harmonic_level(std::size_t k);

struct GaussianApproximants {
  std::vector<double> plus, minus;  // well-centred Gaussians g_+, g_-
  std::vector<double> even, odd;    // g_0, g_1, unit norm on the grid
  double z0 = 1.0, z1 = 1.0;
};

GaussianApproximants gaussian_approximants(double beta, const Grid& grid, const Potential& p);

// Regular exponent integrand [W' + sqrt(2 W''(1) W)] / (2W) of the
// tunnelling prefactor; 2/(1+x) for the quartic well.
double tunneling_integrand(const Potential& p, double x);

// A_W. Throws NumericError if the integrand has no finite limit at x -> 1.
double tunneling_prefactor(const Potential& p);

// A_W sqrt(beta) exp(-beta C_W)
double predicted_gap(double beta, const Potential& p);

// 2 / (A_W sqrt(beta)) exp(beta C_W)
double critical_length(double beta, const Potential& p);

// Trapezoid sum of f over the grid nodes inside [a, b].
double grid_integral(const Grid& grid, const std::vector<double>& f, double a, double b);

struct SemiclassicalReport {
  double beta = 0.0;
  std::vector<double> energies;         // extrapolated E_k
  std::vector<double> harmonic_levels;  // limits of E_{2j}, E_{2j+1}: (j + 1/2) omega
  double gap = 0.0;
  double predicted_gap = 0.0;
  double gap_ratio = 0.0;
  double critical_length = 0.0;
  double gaussian_deviation[2] = {0.0, 0.0};  // beta |psi_k - g_k|^2, k = 0, 1
  double well_integral_psi0[2] = {0.0, 0.0};  // over I_+, I_-
  double well_integral_psi1[2] = {0.0, 0.0};
  double right_half_psi0 = 0.0;               // integral over x > 1/2
  double well_integral_target = 0.0;          // (pi / (beta omega))^{1/4}
  double total_integral_psi1 = 0.0;
  double overlap_psi0_psi1[2] = {0.0, 0.0};   // integral of psi0 psi1 over I_+, I_-
  double splitting_ratio = 0.0;  // sup_{x>=0} psi0 |psi0 - psi1| / (beta^{3/2} gap)
  double decay_rate = 0.0;       // -log psi0(2) / (2 beta)
  std::vector<std::string> warnings;
};

SemiclassicalReport semiclassical_report(const SpectralModel& m);

}  // namespace phi4
