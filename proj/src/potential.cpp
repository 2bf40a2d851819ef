#include "phi4/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phi4/error.hpp"
#include "phi4/quadrature.hpp"

namespace phi4 {

Potential quartic_potential() {
  return Potential(
      "quartic", [](double x) { return 0.5 * (x * x - 1.0) * (x * x - 1.0); },
      [](double x) { return 2.0 * x * (x * x - 1.0); },
      [](double x) { return 6.0 * x * x - 2.0; });
}

Potential harmonic_potential() {
  return Potential(
      "harmonic", [](double x) { return 0.5 * x * x; }, [](double x) { return x; },
      [](double) { return 1.0; });
}

Potential scaled(const Potential& p, double factor) {
  std::ostringstream name;
  name << factor << "*" << p.name();
  return Potential(
      name.str(), [p, factor](double x) { return factor * p.eval(x); },
      [p, factor](double x) { return factor * p.deriv1(x); },
      [p, factor](double x) { return factor * p.deriv2(x); });
}

void validate_double_well(const Potential& p) {
  constexpr double kTol = 1e-12;
  if (std::abs(p.eval(1.0)) > kTol || std::abs(p.eval(-1.0)) > kTol) {
    throw DomainError(p.name() + ": W(+-1) must vanish");
  }
  if (!(p.curvature_at_well() > 0.0)) {
    throw DomainError(p.name() + ": W''(1) must be positive");
  }
  for (int i = 0; i <= 400; ++i) {
    const double x = -3.0 + 6.0 * i / 400.0;
    const double w = p.eval(x);
    const double scale = std::max(1.0, std::abs(w));
    if (std::abs(w - p.eval(-x)) > kTol * scale) {
      throw DomainError(p.name() + ": potential is not symmetric");
    }
    if (std::abs(std::abs(x) - 1.0) > 1e-9 && !(w > 0.0)) {
      throw DomainError(p.name() + ": potential must be positive off the wells");
    }
  }
}

namespace {

double sqrt2w(const Potential& p, double x) {
  return std::sqrt(2.0 * std::max(0.0, p.eval(x)));
}

// Signed integral of sqrt(2W) from a to b, with panels split at the wells
// where the integrand has a kink.
double weighted_length(const Potential& p, double a, double b) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  double total = 0.0;
  double left = lo;
  for (double cut : {-1.0, 1.0, hi}) {
    const double right = std::clamp(cut, lo, hi);
    if (right > left) {
      total += integrate([&p](double x) { return sqrt2w(p, x); }, left, right);
      left = right;
    }
  }
  return sign * total;
}

}  // namespace

double surface_tension(const Potential& p) {
  validate_double_well(p);
  return weighted_length(p, -1.0, 1.0);
}

double agmon_distance(const Potential& p, double x) {
  const double from_left = std::abs(weighted_length(p, -1.0, x));
  const double from_right = std::abs(weighted_length(p, 1.0, x));
  return std::min(from_left, from_right);
}

}  // namespace phi4
