#pragma once

#include <functional>
#include <vector>

namespace phi4 {

// Node/weight pairs on the reference interval [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;  // polynomials of degree <= order are integrated exactly

  double apply(const std::function<double(double)>& f, double a, double b) const;
};

// Gauss-Legendre rule with 20 points (exact up to degree 39).
const QuadratureRule& gauss_legendre_20();

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  int max_depth = 40;
};

// Adaptive Gauss-Legendre: a panel is accepted once the whole-panel value
// and the sum over its two halves agree within the panel's share of
// abs_tol. Throws NumericError when max_depth is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& opts = {});

}  // namespace phi4
