#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phi4/grid.hpp"
#include "phi4/matrix.hpp"
#include "phi4/potential.hpp"
#include "phi4/tridiagonal.hpp"

namespace phi4 {

// H = -(1/2 beta) d^2/dx^2 + beta W on the interior nodes 1..n-2 of the
// grid; the end nodes are Dirichlet.
struct DiscreteHamiltonian {
  Grid grid;
  double beta;
  SymTridiagonal op;
};

DiscreteHamiltonian build_hamiltonian(const Potential& p, double beta, const Grid& grid);

// Eigenpairs on the full grid. Vectors have one entry per grid node (zero at
// the ends) and unit norm under the grid quadrature sum_i v_i^2 h.
struct Spectrum {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

Spectrum solve_lowest(const DiscreteHamiltonian& h, std::size_t count);

enum class SolveMethod { parity, full };

struct SpectralModel {
  Potential potential;
  Grid grid;
  double beta;
  // Richardson-extrapolated when more than one level was used.
  std::vector<double> eigenvalues;
  // Raw eigenvalues of the finest grid; these belong with the eigenfunctions
  // and are what the dynamics use.
  std::vector<double> grid_eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;
  // Empirical order per eigenvalue, NaN with fewer than three levels.
  std::vector<double> convergence_order;
  std::size_t levels = 1;
  std::vector<std::string> warnings;

  std::size_t count() const { return eigenvalues.size(); }
  double weight() const { return grid.spacing(); }
};

// Even sector: half-line problem with a reflection condition at 0, gives
// E_0, E_2, ...; odd sector: Dirichlet at 0, gives E_1, E_3, ...
SpectralModel solve_parity_reduced(const Potential& p, double beta, const Grid& grid,
                                   std::size_t count = 8);

SpectralModel solve_full(const Potential& p, double beta, const Grid& grid, std::size_t count = 8);

// Solves on base, base/2, ... (levels grids) and extrapolates assuming an
// O(h^2) leading error.
SpectralModel refine_extrapolate(const Potential& p, double beta, const Grid& base,
                                 std::size_t levels, std::size_t count = 8,
                                 SolveMethod method = SolveMethod::parity);

// Default grid recipe for the double-well problems: R = 2.5, h = 0.004 for
// beta < 8 and 0.002 above, two levels.
SpectralModel default_model(const Potential& p, double beta, std::size_t count = 8);

double spectral_gap(const SpectralModel& m);

struct EffectivePotential {
  std::vector<double> value;  // U_beta, minimum over valid nodes is 0
  std::vector<double> slope;  // U_beta'
  std::vector<char> valid;    // 0 where psi_0 underflows (always at the ends)
  std::size_t masked = 0;

  // Drift of the diffusion, -U_beta'.
  double drift(std::size_t i) const { return -slope[i]; }
};

EffectivePotential effective_potential(const SpectralModel& m);

// max |U'^2/2 - U''/(2 beta) - W + E_0/beta| over |x| <= R - 0.5, using the
// finest-grid E_0 and central differences of U_beta.
double riccati_residual(const SpectralModel& m);

// g_t(x_i, x_j) = sum_{k<K} exp(-t (E_k - E_0)) psi_k(x_i) psi_k(x_j).
Matrix heat_kernel(const SpectralModel& m, double t, std::size_t truncation);

// sum_i f_i g_i h
double grid_inner(const SpectralModel& m, const std::vector<double>& f, const std::vector<double>& g);

}  // namespace phi4
