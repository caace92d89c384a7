#include "chaoslab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chaoslab {

double GridSpec::cell_volume() const {
  return std::pow(spacing(), dimension);
}

std::size_t GridSpec::total_points() const {
  return dimension == 1 ? points_per_axis : points_per_axis * points_per_axis;
}

Point GridSpec::coordinate(std::size_t flat_index) const {
  const double h = spacing();
  if (dimension == 1) return {origin + h * static_cast<double>(flat_index), 0.0};
  const std::size_t i0 = flat_index / points_per_axis;
  const std::size_t i1 = flat_index % points_per_axis;
  return {origin + h * static_cast<double>(i0), origin + h * static_cast<double>(i1)};
}

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("grid: unsupported dimension " + std::to_string(dimension));
  if (!is_power_of_two(points_per_axis))
    throw std::invalid_argument("grid: points per axis must be a power of two");
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw std::invalid_argument("grid: extent must be positive");
}

GridSpec circle_grid(std::size_t points) {
  return GridSpec{1, points, 1.0, 0.0};
}

std::size_t periodic_lag(std::size_t i, std::size_t j, std::size_t n) {
  const std::size_t d = i > j ? i - j : j - i;
  return d <= n - d ? d : n - d;
}

bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

}  // namespace chaoslab
