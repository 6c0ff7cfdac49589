#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shopsim/world.hpp"

namespace shopsim {

enum class Cell : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// Robot-centric occupancy grid: +x forward, +y to the robot's left, robot at
// the center cell. Rebuilt from scratch from each scan.
struct OccupancyGrid {
  double resolution = 0.05;
  int width = 0;   // cells along forward axis
  int height = 0;  // cells along lateral axis
  std::vector<Cell> cells;

  Cell at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * width + ix)]; }
  Cell& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy * width + ix)]; }

  // Cell-center coordinates in the robot frame.
  double cell_x(int ix) const { return (ix + 0.5) * resolution - 0.5 * width * resolution; }
  double cell_y(int iy) const { return (iy + 0.5) * resolution - 0.5 * height * resolution; }

  bool index_of(double fx, double fy, int& ix, int& iy) const;
};

struct CostmapParams {
  double resolution = 0.05;
  double extent = 4.0;  // grid is extent x extent meters, robot-centered
};

struct CorridorSlice {
  double half_width = 0.3;
  double max_lookahead = 1.5;
};

// Ray endpoints (actual hits only) mark cells Occupied, cells along each ray
// short of the endpoint are Free, everything untouched stays Unknown.
OccupancyGrid build_costmap(const RangeScan& scan, const CostmapParams& params);

// Minimum forward coordinate of any Occupied cell inside the slice; absent
// when the slice is clear. Unknown counts as free.
std::optional<double> dist_ahead(const OccupancyGrid& grid, const CorridorSlice& slice);

enum class Side { Left, Right };

// Side whose forward half (within the lookahead) holds more Free cells.
// Ties resolve to Left.
Side free_side_bias(const OccupancyGrid& grid, const CorridorSlice& slice);

// Debug dump: one char per cell ('.' Free, '#' Occupied, '?' Unknown), top
// row is farthest forward, leftmost column is the robot's far left.
std::string dump_ascii(const OccupancyGrid& grid);

}  // namespace shopsim
