#pragma once

#include <cstddef>

namespace phi4 {

// Uniform symmetric grid on [-R, R] with an odd number of nodes, so that
// x = 0 is the centre node. The end nodes carry homogeneous Dirichlet data.
class Grid {
 public:
  Grid(double half_width, std::size_t points);

  // Smallest odd node count whose spacing does not exceed `max_spacing`.
  static Grid with_spacing(double half_width, double max_spacing);

  double half_width() const { return half_width_; }
  std::size_t size() const { return points_; }
  double spacing() const { return spacing_; }
  std::size_t center() const { return (points_ - 1) / 2; }
  // Measured from the centre so that x(c) = 0 and x(mirror(i)) = -x(i) exactly.
  double x(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(center())) * spacing_;
  }
  std::size_t mirror(std::size_t i) const { return points_ - 1 - i; }

  // Nearest node to x (clamped to the grid).
  std::size_t nearest(double x) const;

  // Same interval, spacing halved.
  Grid refined() const { return Grid(half_width_, 2 * (points_ - 1) + 1); }

 private:
  double half_width_;
  std::size_t points_;
  double spacing_;
};

}  // namespace phi4
