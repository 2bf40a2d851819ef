#include <algorithm>
#include <cmath>
#include <limits>

#include "phi4/error.hpp"
#include "phi4/sampler.hpp"

namespace phi4 {

namespace {

// Truncated series for g_t; a thin wrapper so all three densities share the
// same eigenvalue offsets.
Matrix kernel_series(const SpectralModel& m, double t, std::size_t kmax) {
  if (t > 0.0) return heat_kernel(m, t, kmax);
  // g_0 is the identity under grid quadrature.
  const std::size_t n = m.grid.size();
  Matrix g(n, n);
  for (std::size_t i = 1; i + 1 < n; ++i) g(i, i) = 1.0 / m.grid.spacing();
  return g;
}

void normalize(Matrix& a, double weight) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  s *= weight;
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericError("endpoint density has no positive mass");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] /= s;
  }
}

void normalize(std::vector<double>& a, double weight) {
  double s = 0.0;
  for (double v : a) s += v;
  s *= weight;
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericError("endpoint density has no positive mass");
  for (double& v : a) v /= s;
}

}  // namespace

std::vector<double> half_line_marginal(const SpectralModel& m, double T, std::size_t truncation) {
  if (!(T > 0.0)) throw DomainError("T must be positive");
  const std::size_t kmax = std::min(truncation, m.eigenfunctions.size());
  const std::size_t c = m.grid.center();
  const auto& psi0 = m.eigenfunctions[0];
  std::vector<double> q(m.grid.size(), 0.0);
  for (std::size_t k = 0; k < kmax; ++k) {
    const auto& psi = m.eigenfunctions[k];
    const double w = std::exp(-T * (m.grid_eigenvalues[k] - m.grid_eigenvalues[0])) * psi[c];
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += w * psi[i];
  }
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= psi0[i] / psi0[c];
  normalize(q, m.grid.spacing());
  return q;
}

EndpointDensities endpoint_densities(const SpectralModel& m, double length, double T,
                                     std::size_t truncation) {
  if (!(T >= 0.0) || !(T < 0.5 * length)) throw DomainError("need 0 <= T < length / 2");
  const std::size_t kmax = std::min(truncation, m.eigenfunctions.size());
  const std::size_t n = m.grid.size();
  const double h = m.grid.spacing();
  const auto& psi0 = m.eigenfunctions[0];

  // H_T(x) = integral of g_T(a, x) da
  std::vector<double> ht(n, 0.0);
  if (T > 0.0) {
    ht = spectral_h(m, T, kmax);
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) ht[i] = 1.0;
  }
  const Matrix g = kernel_series(m, length - 2.0 * T, kmax);

  EndpointDensities out;
  out.rho = Matrix(n, n);
  out.rho_bar = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.rho(i, j) = ht[i] * g(i, j) * ht[j];
      out.rho_bar(i, j) = psi0[i] * g(i, j) * psi0[j];
    }
  }
  normalize(out.rho, h * h);
  normalize(out.rho_bar, h * h);
  out.q = T > 0.0 ? half_line_marginal(m, T, kmax) : std::vector<double>(n, 0.0);
  if (T == 0.0) {
    out.q[m.grid.center()] = 1.0 / h;
  }
  const double ek = m.grid_eigenvalues[kmax - 1] - m.grid_eigenvalues[0];
  const double t_min = T > 0.0 ? std::min(T, length - 2.0 * T) : length;
  out.tail_bound = std::exp(-t_min * ek);
  return out;
}

}  // namespace phi4
