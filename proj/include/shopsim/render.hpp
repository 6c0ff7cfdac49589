#pragma once

#include <string>
#include <vector>

#include "shopsim/semantic_map.hpp"
#include "shopsim/world.hpp"

namespace shopsim {

struct TrajectoryPoint {
  double t = 0, x = 0, y = 0, yaw = 0;
};

std::vector<TrajectoryPoint> load_trajectory_csv(const std::string& bytes);  // ParseError

// Deterministic SVG: walls, zones, junction markers with their POI pairs,
// and the trajectory polyline.
std::string render_svg(const WorldConfig& config, const SemanticMap& map,
                       const std::vector<TrajectoryPoint>& trajectory);

// Coarse ASCII snapshot of the same scene.
std::string render_ascii(const WorldConfig& config,
                         const std::vector<TrajectoryPoint>& trajectory);

}  // namespace shopsim
