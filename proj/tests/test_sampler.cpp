#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>

#include "phi4/error.hpp"
#include "phi4/interfaces.hpp"
#include "phi4/path_io.hpp"
#include "phi4/potential.hpp"
#include "phi4/sampler.hpp"
#include "phi4/semiclassics.hpp"

using namespace phi4;

namespace {

const Potential kQuartic = quartic_potential();

std::shared_ptr<const SpectralModel> coarse_model(double beta, double h = 0.02) {
  return std::make_shared<const SpectralModel>(sampling_model(kQuartic, beta, h));
}

// exp(dt L) through the symmetrized generator S = psi L psi^{-1}, which is
// the tridiagonal matrix with off-diagonal a and diagonal L_ii.
Matrix eigen_kernel(const SpectralModel& m, double dt) {
  const auto& psi = m.eigenfunctions[0];
  const std::size_t n = m.grid.size();
  const double a = 1.0 / (2.0 * m.beta * m.grid.spacing() * m.grid.spacing());
  const auto k = static_cast<Eigen::Index>(n - 2);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const std::size_t i = static_cast<std::size_t>(r) + 1;
    s(r, r) = -a * (psi[i - 1] + psi[i + 1]) / psi[i];
    if (r + 1 < k) s(r, r + 1) = s(r + 1, r) = a;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd e = (dt * es.eigenvalues().array()).exp();
  const Eigen::MatrixXd q = es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
  Matrix p(n, n);
  p(0, 0) = p(n - 1, n - 1) = 1.0;
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) + 1, j = static_cast<std::size_t>(c) + 1;
      p(i, j) = q(r, c) * psi[j] / psi[i];
    }
  }
  return p;
}

double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  int dof = -1;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    stat += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
    ++dof;
  }
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Pools grid-node masses into bins holding at least `min_expected` expected
// counts out of n draws. Returns the bin index of each node.
std::vector<std::size_t> pool_bins(const std::vector<double>& mass, double n, double min_expected,
                                   std::size_t& bins) {
  std::vector<std::size_t> bin(mass.size());
  bins = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    bin[i] = bins;
    acc += mass[i] * n;
    if (acc >= min_expected) {
      ++bins;
      acc = 0.0;
    }
  }
  if (acc > 0.0 && bins > 0) {
    for (auto& b : bin) b = std::min(b, bins - 1);
  } else if (acc > 0.0) {
    bins = 1;
  }
  return bin;
}

double node_chi_square(const std::vector<double>& mass, const std::vector<std::size_t>& draws) {
  std::size_t bins = 0;
  const double n = static_cast<double>(draws.size());
  const auto bin = pool_bins(mass, n, 20.0, bins);
  std::vector<double> obs(bins, 0.0), exp(bins, 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) exp[bin[i]] += mass[i] * n;
  for (auto d : draws) obs[bin[d]] += 1.0;
  return chi_square_pvalue(obs, exp);
}

}  // namespace

// ---------------------------------------------------------------- stationary law

TEST(Stationary, NormalizedAndSymmetric) {
  const SpectralModel m = sampling_model(kQuartic, 6.0);
  const auto pi = stationary_density(m);
  double s = 0.0;
  for (double v : pi) s += v * m.grid.spacing();
  EXPECT_NEAR(s, 1.0, 1e-10);
  for (std::size_t i = 0; i < pi.size(); ++i) ASSERT_NEAR(pi[i], pi[m.grid.mirror(i)], 1e-10);
}

TEST(Stationary, WellMassMatchesWkbDensity) {
  // pi ~ exp(-2 beta U(x)) 4 / (1 + |x|)^2. The harmonic Gaussian misses the
  // skew of the well (2.5% low on this window at beta = 10).
  const double beta = 10.0;
  const SpectralModel m = sampling_model(kQuartic, beta, 0.002);
  const auto pi = stationary_density(m);
  double mass = 0.0, right = 0.0, oracle = 0.0, total = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double x = m.grid.x(i);
    const double d = std::exp(-2.0 * beta * agmon_distance(kQuartic, x)) * 4.0 / std::pow(1.0 + std::abs(x), 2);
    total += d;
    if (std::abs(x - 1.0) < 0.25) {
      mass += pi[i] * m.grid.spacing();
      oracle += d;
    }
    if (x > 0.0) right += pi[i] * m.grid.spacing();
    if (x == 0.0) right += 0.5 * pi[i] * m.grid.spacing();
  }
  EXPECT_NEAR(mass / (oracle / total), 1.0, 0.02);
  EXPECT_NEAR(right, 0.5, 1e-10);
}

// ---------------------------------------------------------------- kernel

TEST(Kernel, StochasticReversibleStationary) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel k(m, 0.005);
  const auto& pi = k.stationary();
  double total = 0.0;
  for (double v : pi) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (std::size_t i = 0; i < k.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      ASSERT_GE(k(i, j), 0.0);
      s += k(i, j);
    }
    ASSERT_NEAR(s, 1.0, 1e-12) << i;
  }
  double balance = 0.0, stat = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      s += pi[i] * k(i, j);
      balance = std::max(balance, std::abs(pi[i] * k(i, j) - pi[j] * k(j, i)));
    }
    stat = std::max(stat, std::abs(s - pi[j]));
  }
  EXPECT_LE(balance, 1e-10);
  EXPECT_LE(stat, 1e-10);
  EXPECT_LE(k.trimmed_mass(), 1e-15);
}

TEST(Kernel, MatchesEigendecompositionOracle) {
  const auto m = coarse_model(4.0);
  for (double dt : {0.005, 0.05, 0.5}) {
    const TransitionKernel k(m, dt);
    const Matrix oracle = eigen_kernel(*m, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k.stationary()[i] < 1e-12) continue;  // the oracle loses digits in psi_j / psi_i
      for (std::size_t j = 0; j < k.size(); ++j) worst = std::max(worst, std::abs(k(i, j) - oracle(i, j)));
    }
    EXPECT_LE(worst, 1e-10) << dt;
  }
}

TEST(Kernel, Semigroup) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel half(m, 0.002), one(m, 0.004);
  const Matrix two = multiply(half.matrix(), half.matrix());
  double worst = 0.0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    for (std::size_t j = 0; j < one.size(); ++j) worst = std::max(worst, std::abs(two(i, j) - one(i, j)));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Kernel, LongStepForgetsTheStart) {
  const auto m = coarse_model(4.0);
  const TransitionKernel k(m, 800.0);
  const auto& pi = k.stationary();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    for (std::size_t j = 0; j < k.size(); ++j) worst = std::max(worst, std::abs(k(i, j) - pi[j]));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Kernel, RejectsBadStep) {
  const auto m = coarse_model(4.0);
  EXPECT_THROW(TransitionKernel(m, 0.0), DomainError);
  EXPECT_THROW(TransitionKernel(m, -1.0), DomainError);
}

TEST(Alias, ReproducesWeights) {
  const std::vector<double> w = {1.0, 0.0, 3.0, 6.0};
  const AliasTable t(w);
  Rng rng(3);
  std::vector<double> counts(4, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[t.sample(rng)] += 1.0;
  EXPECT_EQ(counts[1], 0.0);
  EXPECT_NEAR(counts[0] / n, 0.1, 0.005);
  EXPECT_NEAR(counts[2] / n, 0.3, 0.005);
  EXPECT_NEAR(counts[3] / n, 0.6, 0.005);
  EXPECT_THROW(AliasTable(std::vector<double>{0.0, 0.0}), DomainError);
  EXPECT_THROW(AliasTable(std::vector<double>{1.0, -1.0}), DomainError);
}

// ---------------------------------------------------------------- stationary paths

TEST(StationaryPath, SingleTimeLawIsPi) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel k(m, 0.005);
  const std::size_t n = 100000;
  std::vector<std::size_t> last(n);
  double plus = 0.0, wsum = 0.0, wsq = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = replica_rng(99, r);
    const PathSample p = sample_stationary_path(k, 0.02, rng);
    ASSERT_EQ(p.size(), 5u);
    last[r] = p.nodes.back();
    const double x = p.values.back();
    plus += x > 0.0;
    const double w = kQuartic.eval(x);
    wsum += w;
    wsq += w * w;
  }
  EXPECT_NEAR(plus / n, 0.5, 3.0 * std::sqrt(0.25 / n));
  double ew = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) ew += kQuartic.eval(m->grid.x(i)) * k.stationary()[i];
  const double mean = wsum / n, sd = std::sqrt(wsq / n - mean * mean);
  EXPECT_NEAR(mean, ew, 3.0 * sd / std::sqrt(double(n)));
  EXPECT_GT(node_chi_square(k.stationary(), last), 0.01);
}

TEST(StationaryPath, ReproducibleAndInRange) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel k(m, 0.005);
  Rng a = replica_rng(5, 17), b = replica_rng(5, 17), c = replica_rng(5, 18);
  const PathSample pa = sample_stationary_path(k, 50.0, a, 5);
  const PathSample pb = sample_stationary_path(k, 50.0, b, 5);
  const PathSample pc = sample_stationary_path(k, 50.0, c, 5);
  EXPECT_EQ(pa.nodes, pb.nodes);
  EXPECT_NE(pa.nodes, pc.nodes);
  EXPECT_EQ(pa.size(), 10001u);
  for (double x : pa.values) {
    ASSERT_LE(std::abs(x), 2.5);
  }
  EXPECT_EQ(pa.leakage, 0u);
}

TEST(StationaryPath, ErgodicAverageOfW) {
  const double beta = 6.0, ell = 100.0;
  const auto m = coarse_model(beta, 0.005);
  const TransitionKernel k(m, 0.005);
  const std::size_t n = 400;
  std::size_t over = 0;
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = replica_rng(2024, r);
    const PathSample p = sample_stationary_path(k, ell, rng);
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      s += 0.5 * (kQuartic.eval(p.values[j]) + kQuartic.eval(p.values[j + 1])) * p.dt;
    }
    over += s / ell > 2.0 / beta;
  }
  EXPECT_LT(static_cast<double>(over) / n, 0.01);
}

// ---------------------------------------------------------------- free boundary

TEST(FreeBoundary, WeightsMatchSpectralSeries) {
  const auto m = coarse_model(5.0, 0.005);
  const auto k = std::make_shared<const TransitionKernel>(m, 0.005);
  const FreeBoundarySampler fb(k);
  const auto c = spectral_coefficients(*m);
  EXPECT_NEAR(c[1], 0.0, 1e-10);
  const auto& psi = m->eigenfunctions[0];
  for (std::size_t r : {200u, 1000u, 3000u}) {
    // The K = 8 series drops modes decaying at least like exp(-t (E_8 - E_0)).
    const double t = r * 0.005;
    const double tail = std::exp(-t * (m->grid_eigenvalues[7] - m->grid_eigenvalues[0]));
    const auto h = spectral_h(*m, t, 8);
    const auto& f = fb.phi(r);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
      if (psi[i] * psi[i] < 1e-8) continue;
      worst = std::max(worst, std::abs(f[i] * psi[i] - h[i]));
      scale = std::max(scale, std::abs(h[i]));
    }
    EXPECT_LE(worst, std::max(1e-6, tail) * scale) << r;
  }
  const auto law = fb.initial_law(500);
  double s = 0.0;
  for (double v : law) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(FreeBoundary, InteriorMarginalMatchesEndpointDensity) {
  // X_T of a free-boundary path against the spectral endpoint density.
  const double beta = 4.0, ell = 6.0, t = 1.0;
  const auto m = coarse_model(beta, 0.02);
  const double dt = 0.01;
  const auto k = std::make_shared<const TransitionKernel>(m, dt);
  const FreeBoundarySampler fb(k);
  const auto d = endpoint_densities(*m, ell, t, 8);
  const std::size_t n = m->grid.size();
  std::vector<double> mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) mass[i] += d.rho(i, j) * m->weight() * m->weight();
  }
  const std::size_t draws = 40000;
  const std::size_t at = static_cast<std::size_t>(std::lround(t / dt));
  std::vector<std::size_t> x(draws);
  for (std::size_t r = 0; r < draws; ++r) {
    Rng rng = replica_rng(31, r);
    x[r] = fb.sample(ell, rng).nodes[at];
  }
  EXPECT_GT(node_chi_square(mass, x), 0.01);
}

TEST(FreeBoundary, SignFlipSymmetry) {
  const auto m = coarse_model(5.0, 0.005);
  const auto k = std::make_shared<const TransitionKernel>(m, 0.005);
  const FreeBoundarySampler fb(k);
  const std::size_t n = 4000;
  double plus_start = 0.0, plus_mid = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = replica_rng(77, r);
    const PathSample p = fb.sample(40.0, rng);
    plus_start += p.values.front() > 0.0;
    plus_mid += p.values[p.size() / 2] > 0.0;
  }
  const double tol = 4.0 * std::sqrt(0.25 / n);
  EXPECT_NEAR(plus_start / n, 0.5, tol);
  EXPECT_NEAR(plus_mid / n, 0.5, tol);
}

TEST(FreeBoundary, BulkLooksStationary) {
  const double beta = 5.0, ell = 200.0, bulk = 10.0 * beta;
  const auto m = coarse_model(beta, 0.005);
  const auto k = std::make_shared<const TransitionKernel>(m, 0.005);
  const FreeBoundarySampler fb(k);
  const std::size_t n = 1500;
  const std::size_t mid = step_count(0.5 * ell, 0.005);
  std::vector<std::size_t> free_mid(n), stat_mid(n);
  double free_changes = 0.0, stat_changes = 0.0;
  auto changes = [&](const PathSample& p) {
    double c = 0.0;
    const std::size_t a = step_count(bulk, p.dt), b = step_count(ell - bulk, p.dt);
    for (std::size_t j = a + 1; j <= b; ++j) c += p.values[j] * p.values[j - 1] < 0.0;
    return c;
  };
  for (std::size_t r = 0; r < n; ++r) {
    Rng a = replica_rng(41, r), b = replica_rng(42, r);
    const PathSample pf = fb.sample(ell, a);
    const PathSample ps = sample_stationary_path(*k, ell, b);
    free_mid[r] = pf.nodes[mid];
    stat_mid[r] = ps.nodes[mid];
    free_changes += changes(pf);
    stat_changes += changes(ps);
  }
  EXPECT_GT(node_chi_square(k->stationary(), free_mid), 0.01);
  EXPECT_GT(node_chi_square(k->stationary(), stat_mid), 0.01);
  // Sign changes in the bulk: same mean within a generous Poisson bound.
  const double sd = std::sqrt(free_changes + stat_changes);
  EXPECT_LE(std::abs(free_changes - stat_changes), 4.0 * sd);
}

// ---------------------------------------------------------------- Euler-Maruyama

TEST(EulerMaruyama, DriftVanishesNearWell) {
  const double beta = 5.0;
  const SpectralModel m = sampling_model(kQuartic, beta);
  const DriftField drift(m);
  EXPECT_LE(std::abs(drift(1.0)), 1.0 / beta);
  EXPECT_NEAR(drift(0.0), 0.0, 1e-12);
  EXPECT_GT(drift(0.5), 0.0);
  EXPECT_LT(drift(1.5), 0.0);
}

TEST(EulerMaruyama, ZeroNoiseFlowsIntoWell) {
  // The flow stops at the minimum of U_beta, which sits 1 - O(1/beta) inside
  // the well: x^2 - 1 + 1 / (beta (1 + x)) = 0 to first order.
  for (double beta : {5.0, 12.0}) {
    const SpectralModel m = sampling_model(kQuartic, beta);
    Rng rng(1);
    EulerMaruyamaOptions opts;
    opts.noise_scale = 0.0;
    const PathSample p = euler_maruyama_path(m, 0.5, 20.0, 1e-3, rng, opts);
    const DriftField drift(m);
    double xs = 1.0;
    for (int k = 0; k < 60; ++k) xs = std::sqrt(1.0 - 1.0 / (beta * (1.0 + xs)));
    EXPECT_NEAR(p.values.back(), xs, 0.01) << beta;
    EXPECT_NEAR(p.values.back(), 1.0, 0.5 / beta) << beta;
    EXPECT_NEAR(drift(p.values.back()), 0.0, 1e-6);
    for (std::size_t j = 1; j < p.size(); ++j) ASSERT_GE(p.values[j], p.values[j - 1]);
  }
}

TEST(EulerMaruyama, RejectsUnstableStep) {
  const SpectralModel m = sampling_model(kQuartic, 5.0);
  Rng rng(1);
  EXPECT_THROW(euler_maruyama_path(m, 0.5, 1.0, 1.0, rng), DomainError);
}

TEST(EulerMaruyama, OccupationMatchesPi) {
  const double beta = 5.0, dt = 1e-3, length = 5e4, bin = 0.1;
  const SpectralModel m = sampling_model(kQuartic, beta);
  const auto pi = stationary_density(m);
  const double r = m.grid.half_width();
  const std::size_t bins = 50;
  std::vector<double> target(bins, 0.0), hist(bins, 0.0);
  for (std::size_t i = 0; i + 1 < m.grid.size(); ++i) {
    const double mid = 0.5 * (m.grid.x(i) + m.grid.x(i + 1));
    target[std::min<std::size_t>(bins - 1, (mid + r) / bin)] += 0.5 * (pi[i] + pi[i + 1]) * m.grid.spacing();
  }
  EulerMaruyamaStepper em(std::make_shared<const DriftField>(m), beta, r, dt);
  Rng rng = replica_rng(8, 0);
  double x = 1.0;
  const std::size_t steps = step_count(length, dt);
  for (std::size_t j = 0; j < steps; ++j) {
    x = em.step(x, rng);
    hist[std::min<std::size_t>(bins - 1, (x + r) / bin)] += 1.0;
  }
  // Symmetrize: the two wells exchange mass only every ~lbar.
  double tv = 0.0, total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) total += hist[b];
  for (std::size_t b = 0; b < bins; ++b) {
    const double s = 0.5 * (hist[b] + hist[bins - 1 - b]) / total;
    tv += std::abs(s - target[b]);
  }
  EXPECT_LE(0.5 * tv, 0.02);
}

// ---------------------------------------------------------------- endpoint densities

TEST(Endpoints, NormalizedAndConverging) {
  const SpectralModel m = sampling_model(kQuartic, 4.0, 0.02);
  const double ell = 40.0, h = m.weight();
  double prev = 1.0;
  for (double t : {0.0, 1.0, 2.0, 4.0, 8.0}) {
    const auto d = endpoint_densities(m, ell, t, 8);
    double a = 0.0, b = 0.0, c = 0.0;
    for (double v : d.rho.data()) a += v * h * h;
    for (double v : d.rho_bar.data()) b += v * h * h;
    for (double v : d.q) c += v * h;
    EXPECT_NEAR(a, 1.0, 1e-8);
    EXPECT_NEAR(b, 1.0, 1e-8);
    EXPECT_NEAR(c, 1.0, 1e-8);
    const double tv = total_variation(d.rho, d.rho_bar, h * h);
    if (t > 0.0) {
      EXPECT_LT(tv, prev) << t;
      EXPECT_GT(d.tail_bound, 0.0);
      EXPECT_LT(d.tail_bound, 1.0);
    }
    prev = tv;
  }
  EXPECT_THROW(endpoint_densities(m, ell, 20.0, 8), DomainError);
}

TEST(Endpoints, HalfLineMarginalDecaysAtSecondGap) {
  const SpectralModel m = sampling_model(kQuartic, 6.0, 0.005);
  const auto pi = stationary_density(m);
  const double rate = m.grid_eigenvalues[2] - m.grid_eigenvalues[0];
  std::vector<double> scaled;
  double prev = 1.0;
  for (double t : {2.0, 5.0, 10.0, 15.0, 20.0}) {
    const double tv = total_variation(half_line_marginal(m, t, 8), pi, m.weight());
    EXPECT_LT(tv, prev);
    prev = tv;
    scaled.push_back(tv * std::exp(rate * (t - 1.0)));
  }
  // tv * exp(rate (T - 1)) settles to a constant c.
  EXPECT_NEAR(scaled[4] / scaled[2], 1.0, 0.1);
  EXPECT_LE(prev, 1e-6);
}

// ---------------------------------------------------------------- path records

TEST(PathRecord, ChainRoundTrip) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel k(m, 0.005);
  Rng rng(4);
  const PathSample p = sample_stationary_path(k, 3.0, rng, 123456789);
  std::stringstream buf;
  write_path(buf, p);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.substr(0, 8), "PHI4PATH");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[9]), 0u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[44]), 0u);  // boundary kind
  // header 8 + 4 + 8 + 8 + 8 + 8 + 1 + 8 + 4, then u16 samples
  EXPECT_EQ(bytes.size(), 57u + 2u * p.size());
  const PathSample q = read_path(buf);
  EXPECT_EQ(q.nodes, p.nodes);
  EXPECT_EQ(q.values, p.values);
  EXPECT_EQ(q.seed, p.seed);
  EXPECT_EQ(q.kind, BoundaryKind::stationary);
  EXPECT_DOUBLE_EQ(q.dt, p.dt);
  EXPECT_DOUBLE_EQ(q.beta, p.beta);
  EXPECT_NEAR(q.length, p.length, 1e-12);
  EXPECT_EQ(q.grid_points, m->grid.size());
}

TEST(PathRecord, SdeRoundTripAndCorruption) {
  const SpectralModel m = sampling_model(kQuartic, 5.0);
  Rng rng(9);
  const PathSample p = euler_maruyama_path(m, -1.0, 1.0, 1e-3, rng, {}, 7);
  std::stringstream buf;
  write_path(buf, p);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.size(), 57u + 8u * p.size());
  const PathSample q = read_path(buf);
  EXPECT_EQ(q.kind, BoundaryKind::sde);
  EXPECT_EQ(q.values, p.values);

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream b1(bad);
  EXPECT_THROW(read_path(b1), DomainError);
  std::stringstream b2(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_path(b2), DomainError);
}

TEST(PathRecord, Csv) {
  const auto m = coarse_model(5.0, 0.005);
  const TransitionKernel k(m, 0.005);
  Rng rng(4);
  const PathSample p = sample_stationary_path(k, 0.01, rng);
  std::stringstream out;
  write_path_csv(out, p);
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, "t,x");
  int rows = 0;
  while (std::getline(out, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
