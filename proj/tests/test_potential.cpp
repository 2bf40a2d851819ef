#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "phi4/error.hpp"
#include "phi4/potential.hpp"
#include "phi4/quadrature.hpp"

using namespace phi4;

namespace {

// Composite midpoint rule, independent of the library quadrature.
double midpoint(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

double quartic_agmon_closed(double x) {
  const double a = std::abs(x);
  return (1.0 - a) * (1.0 - a) * (2.0 + a) / 3.0;
}

}  // namespace

TEST(Quartic, ValuesAndDerivatives) {
  const Potential w = quartic_potential();
  EXPECT_DOUBLE_EQ(w.eval(0.0), 0.5);
  EXPECT_EQ(w.eval(1.0), 0.0);
  EXPECT_EQ(w.eval(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(w.deriv2(1.0), 4.0);
  EXPECT_DOUBLE_EQ(w.deriv1(0.5), -0.75);
}

TEST(Quartic, DerivativesMatchFiniteDifferences) {
  const Potential w = quartic_potential();
  const double h = 1e-5;
  for (double x = -2.0; x <= 2.0; x += 0.173) {
    EXPECT_NEAR(w.deriv1(x), (w.eval(x + h) - w.eval(x - h)) / (2 * h), 1e-8) << x;
    EXPECT_NEAR(w.deriv2(x), (w.deriv1(x + h) - w.deriv1(x - h)) / (2 * h), 1e-8) << x;
  }
}

TEST(Quartic, IsDoubleWell) {
  EXPECT_NO_THROW(validate_double_well(quartic_potential()));
  EXPECT_THROW(validate_double_well(harmonic_potential()), DomainError);
  const Potential shifted("shifted", [](double x) { return 0.5 * (x * x - 1) * (x * x - 1) + 0.1; },
                          [](double x) { return 2 * x * (x * x - 1); },
                          [](double x) { return 6 * x * x - 2; });
  EXPECT_THROW(validate_double_well(shifted), DomainError);
  const Potential tilted("tilted", [](double x) { return 0.5 * (x * x - 1) * (x * x - 1) * (1 + 0.1 * x); },
                         [](double) { return 0.0; }, [](double) { return 4.0; });
  EXPECT_THROW(validate_double_well(tilted), DomainError);
}

TEST(Quadrature, IntegratesPolynomialsAndSmoothFunctions) {
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 3.0), 9.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, -1.0, 2.0), std::exp(2.0) - std::exp(-1.0),
              1e-12);
  // Kink inside a panel.
  EXPECT_NEAR(integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0), 0.5 * (1.3 * 1.3 + 0.7 * 0.7),
              1e-11);
  // Degree 39 is exact for one panel.
  const auto& gl = gauss_legendre_20();
  EXPECT_EQ(gl.order, 39);
  EXPECT_NEAR(gl.apply([](double x) { return std::pow(x, 38); }, -1.0, 1.0), 2.0 / 39.0, 1e-14);
}

TEST(SurfaceTension, QuarticIsFourThirds) {
  EXPECT_NEAR(surface_tension(quartic_potential()), 4.0 / 3.0, 1e-10);
}

TEST(SurfaceTension, AgreesWithMidpointOracle) {
  const Potential w = quartic_potential();
  const double mid = midpoint([&](double x) { return std::sqrt(2.0 * w.eval(x)); }, -1.0, 1.0, 1000000);
  EXPECT_NEAR(surface_tension(w), mid, 1e-8);
}

TEST(SurfaceTension, ScalesWithSquareRoot) {
  const Potential w = quartic_potential();
  EXPECT_NEAR(surface_tension(scaled(w, 4.0)), 2.0 * surface_tension(w), 1e-10);
}

TEST(Agmon, KnownValues) {
  const Potential w = quartic_potential();
  EXPECT_NEAR(agmon_distance(w, 0.0), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(agmon_distance(w, 1.0), 0.0, 1e-14);
  EXPECT_NEAR(agmon_distance(w, -1.0), 0.0, 1e-14);
  EXPECT_NEAR(agmon_distance(w, 0.5), 0.2083333333333333, 1e-10);
}

TEST(Agmon, MatchesCorrectedClosedForm) {
  const Potential w = quartic_potential();
  for (double x = -2.0; x <= 2.0; x += 0.0625) {
    EXPECT_NEAR(agmon_distance(w, x), quartic_agmon_closed(x), 1e-8) << x;
  }
}

TEST(Agmon, PrintedClosedFormDisagreesOffTheWells) {
  // |1 - x^2| (2 + |x|) / 3 is not the defining integral at x = 0.5.
  const double printed = std::abs(1 - 0.25) * 2.5 / 3.0;
  EXPECT_GT(std::abs(agmon_distance(quartic_potential(), 0.5) - printed), 0.1);
}

TEST(Agmon, SymmetricAndSlopeIsSqrtTwoW) {
  const Potential w = quartic_potential();
  const double h = 1e-4;
  for (double x = 0.05; x < 2.0; x += 0.0917) {
    EXPECT_NEAR(agmon_distance(w, x), agmon_distance(w, -x), 1e-12) << x;
    if (std::abs(x - 1.0) < 0.02) continue;
    const double slope = (agmon_distance(w, x + h) - agmon_distance(w, x - h)) / (2 * h);
    EXPECT_NEAR(std::abs(slope), std::sqrt(2.0 * w.eval(x)), 1e-6) << x;
  }
}

TEST(Agmon, SurfaceTensionIsTwiceBarrier) {
  const Potential w = quartic_potential();
  EXPECT_NEAR(surface_tension(w), 2.0 * agmon_distance(w, 0.0), 1e-10);
}
