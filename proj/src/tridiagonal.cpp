#include "phi4/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "phi4/error.hpp"
#include "phi4/matrix.hpp"

namespace phi4 {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm2(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

// LU factorization of (T - lambda I) with partial pivoting; row
// interchanges introduce a second superdiagonal.
struct ShiftedLU {
  std::vector<double> d, du, du2, dl;
  std::vector<char> swapped;

  ShiftedLU(const SymTridiagonal& t, double lambda, double tiny) {
    const std::size_t n = t.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - lambda;
    du = t.off;
    dl = t.off;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    for (double& x : d) {
      if (std::abs(x) < tiny) x = std::copysign(tiny, x == 0.0 ? 1.0 : x);
    }
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      if (ii + 1 < n) s -= du[ii] * b[ii + 1];
      if (ii + 2 < n) s -= du2[ii] * b[ii + 2];
      b[ii] = s / d[ii];
    }
  }
};

double residual_norm(const SymTridiagonal& t, double lambda, const std::vector<double>& v) {
  auto r = t.apply(v);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * v[i];
  return norm2(r);
}

}  // namespace

double SymTridiagonal::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i < off.size()) row += std::abs(off[i]);
    best = std::max(best, row);
  }
  return best;
}

std::vector<double> SymTridiagonal::apply(const std::vector<double>& v) const {
  const std::size_t n = diag.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += off[i - 1] * v[i - 1];
    if (i + 1 < n) s += off[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

std::size_t sturm_count(const SymTridiagonal& t, double x) {
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, t.norm_inf());
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double bisect_eigenvalue(const SymTridiagonal& t, std::size_t k) {
  if (k >= t.size()) throw DomainError("eigenvalue index out of range");
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < t.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i < t.off.size()) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double pad = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;
  for (int iter = 0; iter < 256; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) || mid == lo || mid == hi) {
      return mid;
    }
    if (sturm_count(t, mid) >= k + 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  std::ostringstream os;
  os << "bisection did not converge for eigenvalue index " << k;
  throw NumericError(os.str());
}

std::vector<double> inverse_iteration(const SymTridiagonal& t, double lambda,
                                      const std::vector<std::vector<double>>& deflate) {
  const std::size_t n = t.size();
  const double tnorm = std::max(t.norm_inf(), 1e-300);
  const ShiftedLU lu(t, lambda, kEps * tnorm);
  // Deterministic, non-symmetric start vector so no parity sector is missed.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  }
  scale(v, 1.0 / norm2(v));
  for (int iter = 0; iter < 8; ++iter) {
    lu.solve(v);
    for (const auto& u : deflate) {
      const double c = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
    }
    const double nv = norm2(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) break;
    scale(v, 1.0 / nv);
    if (iter >= 2 && residual_norm(t, lambda, v) <= 1e-12 * tnorm) break;
  }
  return v;
}

void refine_decaying_tail(const SymTridiagonal& t, double lambda, std::vector<double>& v) {
  const std::size_t n = t.size();
  if (n < 4) return;
  // Walk inwards from the end while the region is classically forbidden.
  std::size_t start = n - 1;
  while (start > 1) {
    const double gap = t.diag[start] - lambda;
    const double coupling = std::abs(t.off[start - 1]) + (start < n - 1 ? std::abs(t.off[start]) : 0.0);
    if (!(gap > coupling)) break;
    --start;
  }
  ++start;  // first index whose value is recomputed
  if (start >= n - 1) return;
  // ratio[i] = v[i] / v[i-1], from the last row inward.
  std::vector<double> ratio(n, 0.0);
  ratio[n - 1] = -t.off[n - 2] / (t.diag[n - 1] - lambda);
  for (std::size_t i = n - 1; i-- > start;) {
    ratio[i] = -t.off[i - 1] / ((t.diag[i] - lambda) + t.off[i] * ratio[i + 1]);
  }
  for (std::size_t i = start; i < n; ++i) v[i] = ratio[i] * v[i - 1];
}

EigenPairs lowest_eigenpairs(const SymTridiagonal& t, std::size_t k) {
  if (k == 0 || k > t.size()) throw DomainError("requested eigenpair count out of range");
  const double tnorm = t.norm_inf();
  EigenPairs out;
  out.values.reserve(k);
  out.vectors.reserve(k);
  for (std::size_t j = 0; j < k; ++j) out.values.push_back(bisect_eigenvalue(t, j));
  for (std::size_t j = 0; j < k; ++j) {
    const double lambda = out.values[j];
    std::vector<std::vector<double>> cluster;
    for (std::size_t i = 0; i < j; ++i) {
      if (std::abs(out.values[i] - lambda) <= 1e-3 * tnorm) cluster.push_back(out.vectors[i]);
    }
    auto v = inverse_iteration(t, lambda, cluster);
    const double res = residual_norm(t, lambda, v);
    if (!(res <= 1e-10 * tnorm)) {
      std::ostringstream os;
      os << "inverse iteration failed for eigenvalue index " << j << " (residual " << res << ")";
      throw NumericError(os.str());
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

}  // namespace phi4
