#pragma once

#include <cstddef>
#include <vector>

namespace phi4 {

// Real symmetric tridiagonal matrix: diag[i] on the diagonal, off[i] at
// (i, i+1) and (i+1, i).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  double norm_inf() const;
  std::vector<double> apply(const std::vector<double>& v) const;
};

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const SymTridiagonal& t, double x);

// k-th smallest eigenvalue (k = 0 is the lowest) by bisection on the
// Sturm count. Throws NumericError carrying k if the iteration cap is hit.
double bisect_eigenvalue(const SymTridiagonal& t, std::size_t k);

struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // unit Euclidean norm
};

// The k algebraically smallest eigenpairs. Eigenvectors come from inverse
// iteration with Gram-Schmidt against earlier members of the same cluster,
// and each pair is checked against the residual bound
// |T v - lambda v| <= 1e-10 |T|.
EigenPairs lowest_eigenpairs(const SymTridiagonal& t, std::size_t k);

// Inverse iteration for a single, already converged eigenvalue.
std::vector<double> inverse_iteration(const SymTridiagonal& t, double lambda,
                                      const std::vector<std::vector<double>>& deflate = {});

// Recomputes the exponentially small components of an eigenvector in the
// classically forbidden region at the high-index end (diag - lambda > 2|off|)
// by the backward ratio recurrence, which is stable in the decaying
// direction. Inverse iteration only resolves those components to absolute
// precision, which breaks log(psi) far from the wells.
void refine_decaying_tail(const SymTridiagonal& t, double lambda, std::vector<double>& v);

}  // namespace phi4
