#include "phi4/grid.hpp"

#include <algorithm>
#include <cmath>

#include "phi4/error.hpp"

namespace phi4 {

Grid::Grid(double half_width, std::size_t points) : half_width_(half_width), points_(points) {
  if (!(half_width > 1.0) || !std::isfinite(half_width)) {
    throw DomainError("grid half-width must exceed the well location 1");
  }
  if (points < 5 || points % 2 == 0) {
    throw DomainError("grid needs an odd number of nodes, at least 5");
  }
  spacing_ = 2.0 * half_width / static_cast<double>(points - 1);
}

Grid Grid::with_spacing(double half_width, double max_spacing) {
  if (!(max_spacing > 0.0)) throw DomainError("grid spacing must be positive");
  auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half_width / max_spacing - 1e-9));
  if (intervals % 2 == 1) ++intervals;
  intervals = std::max<std::size_t>(intervals, 4);
  return Grid(half_width, intervals + 1);
}

std::size_t Grid::nearest(double x) const {
  const double pos = std::round((x + half_width_) / spacing_);
  if (!(pos > 0.0)) return 0;
  if (pos >= static_cast<double>(points_ - 1)) return points_ - 1;
  return static_cast<std::size_t>(pos);
}

}  // namespace phi4
