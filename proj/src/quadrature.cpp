#include "phi4/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <sstream>

#include "phi4/error.hpp"

namespace phi4 {

double QuadratureRule::apply(const std::function<double(double)>& f, double a,
                             double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += weights[i] * f(mid + half * nodes[i]);
  }
  return half * sum;
}

const QuadratureRule& gauss_legendre_20() {
  static const QuadratureRule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    QuadratureRule r;
    r.order = 39;
    // Boost stores the non-negative half; 20 points means no node at 0.
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(-x[i]);
      r.weights.push_back(w[i]);
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double tol, int depth, int max_depth) {
  const auto& rule = gauss_legendre_20();
  const double mid = 0.5 * (a + b);
  const double left = rule.apply(f, a, mid);
  const double right = rule.apply(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol) return refined;
  if (depth >= max_depth) {
    std::ostringstream os;
    os << "adaptive quadrature did not converge on [" << a << ", " << b
       << "], discrepancy " << std::abs(refined - whole);
    throw NumericError(os.str());
  }
  return adapt(f, a, mid, left, 0.5 * tol, depth + 1, max_depth) +
         adapt(f, mid, b, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& opts) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, opts);
  const double whole = gauss_legendre_20().apply(f, a, b);
  const double value = adapt(f, a, b, whole, opts.abs_tol, 0, opts.max_depth);
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  return value;
}

}  // namespace phi4
