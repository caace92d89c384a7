#pragma once

#include <array>
#include <cstddef>

namespace chaoslab {

using Point = std::array<double, 2>;

// Uniform tensor grid with `points_per_axis` cells per axis on the box
// [origin, origin + extent)^d. Grids are treated as periodic by the
// Fourier-based code paths.
struct GridSpec {
  int dimension = 1;
  std::size_t points_per_axis = 0;
  double extent = 1.0;
  double origin = 0.0;

  double spacing() const { return extent / static_cast<double>(points_per_axis); }
  double cell_volume() const;
  std::size_t total_points() const;
  Point coordinate(std::size_t flat_index) const;
  // Throws std::invalid_argument for an unusable grid.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

GridSpec circle_grid(std::size_t points);

// Periodic distance between two grid indices along one axis, in cells.
std::size_t periodic_lag(std::size_t i, std::size_t j, std::size_t n);

bool is_power_of_two(std::size_t n);

}  // namespace chaoslab
