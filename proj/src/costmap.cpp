#include "shopsim/costmap.hpp"

#include <cmath>

namespace shopsim {

bool OccupancyGrid::index_of(double fx, double fy, int& ix, int& iy) const {
  ix = static_cast<int>(std::floor(fx / resolution + 0.5 * width));
  iy = static_cast<int>(std::floor(fy / resolution + 0.5 * height));
  return ix >= 0 && ix < width && iy >= 0 && iy < height;
}

OccupancyGrid build_costmap(const RangeScan& scan, const CostmapParams& params) {
  OccupancyGrid grid;
  grid.resolution = params.resolution;
  grid.width = std::max(2, static_cast<int>(std::lround(params.extent / params.resolution)));
  grid.height = grid.width;
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, Cell::Unknown);

  // Free space first, endpoints after, so a hit is never washed out by a
  // neighbouring ray passing through the same cell.
  const double step = params.resolution * 0.5;
  for (const RangeRay& ray : scan.rays) {
    const double c = std::cos(ray.bearing);
    const double s = std::sin(ray.bearing);
    const bool hit = ray.range < scan.max_range;
    const double free_len = hit ? ray.range - step : ray.range;
    for (double d = step * 0.5; d < free_len; d += step) {
      int ix, iy;
      if (grid.index_of(d * c, d * s, ix, iy)) {
        grid.at(ix, iy) = Cell::Free;
      }
    }
  }
  for (const RangeRay& ray : scan.rays) {
    if (ray.range >= scan.max_range) continue;
    int ix, iy;
    if (grid.index_of(ray.range * std::cos(ray.bearing),
                      ray.range * std::sin(ray.bearing), ix, iy)) {
      grid.at(ix, iy) = Cell::Occupied;
    }
  }
  return grid;
}

std::optional<double> dist_ahead(const OccupancyGrid& grid, const CorridorSlice& slice) {
  std::optional<double> best;
  for (int iy = 0; iy < grid.height; ++iy) {
    const double fy = grid.cell_y(iy);
    if (std::abs(fy) > slice.half_width) continue;
    for (int ix = 0; ix < grid.width; ++ix) {
      if (grid.at(ix, iy) != Cell::Occupied) continue;
      const double fx = grid.cell_x(ix);
      if (fx <= 0.0 || fx > slice.max_lookahead) continue;
      if (!best || fx < *best) best = fx;
    }
  }
  return best;
}

Side free_side_bias(const OccupancyGrid& grid, const CorridorSlice& slice) {
  long left = 0, right = 0;
  for (int iy = 0; iy < grid.height; ++iy) {
    const double fy = grid.cell_y(iy);
    for (int ix = 0; ix < grid.width; ++ix) {
      const double fx = grid.cell_x(ix);
      if (fx <= 0.0 || fx > slice.max_lookahead) continue;
      if (grid.at(ix, iy) != Cell::Free) continue;
      if (fy > 0.0) {
        ++left;
      } else if (fy < 0.0) {
        ++right;
      }
    }
  }
  return left >= right ? Side::Left : Side::Right;
}

std::string dump_ascii(const OccupancyGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.width + 1) * grid.height);
  for (int ix = grid.width - 1; ix >= 0; --ix) {
    for (int iy = grid.height - 1; iy >= 0; --iy) {
      switch (grid.at(ix, iy)) {
        case Cell::Free: out += '.'; break;
        case Cell::Occupied: out += '#'; break;
        case Cell::Unknown: out += '?'; break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace shopsim
