#pragma once

#include <functional>
#include <string>

namespace phi4 {

// A one-dimensional confining potential given by closed-form callables.
// Double-well potentials are symmetric, vanish exactly at the wells +-1 and
// have positive curvature there; see validate_double_well().
class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential(std::string name, Fn value, Fn deriv1, Fn deriv2)
      : name_(std::move(name)),
        value_(std::move(value)),
        deriv1_(std::move(deriv1)),
        deriv2_(std::move(deriv2)) {}

  double eval(double x) const { return value_(x); }
  double operator()(double x) const { return value_(x); }
  double deriv1(double x) const { return deriv1_(x); }
  double deriv2(double x) const { return deriv2_(x); }
  const std::string& name() const { return name_; }

  static constexpr double well_location() { return 1.0; }
  double curvature_at_well() const { return deriv2_(1.0); }

 private:
  std::string name_;
  Fn value_;
  Fn deriv1_;
  Fn deriv2_;
};

// W(x) = (x^2 - 1)^2 / 2.
Potential quartic_potential();

// W0(x) = x^2 / 2. Not a double well; used to certify the eigensolver.
Potential harmonic_potential();

// x -> factor * W(x).
Potential scaled(const Potential& p, double factor);

// Throws DomainError unless p is a symmetric double well with zeros at +-1,
// positive elsewhere on a sample grid, and W''(1) > 0.
void validate_double_well(const Potential& p);

// C_W = integral over [-1, 1] of sqrt(2 W).
double surface_tension(const Potential& p);

// Agmon distance U(x) = min(|int_{-1}^x sqrt(2W)|, |int_1^x sqrt(2W)|).
double agmon_distance(const Potential& p, double x);

}  // namespace phi4
