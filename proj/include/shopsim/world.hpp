#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "shopsim/action.hpp"
#include "shopsim/geometry.hpp"

namespace shopsim {

// Axis-aligned rectangle, used both for free space and for zones.
struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  bool contains(double px, double py) const {
    return px >= xmin && px <= xmax && py >= ymin && py <= ymax;
  }
  double cx() const { return 0.5 * (xmin + xmax); }
  double cy() const { return 0.5 * (ymin + ymax); }
  bool valid() const { return xmax > xmin && ymax > ymin; }
};

// Wall segment (axis-aligned by construction).
struct Segment {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

struct SignboardEntry {
  Direction direction = Direction::Left;
  std::string poi;
};

// A junction: fiducial anchor plus the signboard content. `pose` is the
// nominal stance in front of the signboard (defines Left/Straight/Right),
// `tag_pose` is where the tag physically sits on the wall.
struct JunctionSpec {
  int tag_id = -1;
  Pose2D pose;
  Pose2D tag_pose;
  std::vector<SignboardEntry> signboard;
};

struct StoreSpec {
  std::string category;
  Pose2D entrance;  // on the doorway, heading into the store
  std::optional<int> tag_id;
  Rect interior;
  std::map<std::string, int> stock;
};

struct SensorParams {
  double tag_max_range = 3.0;
  double tag_half_fov = 0.6;
  double dropout_p = 0.0;
  double noise_std_x = 0.0;
  double noise_std_z = 0.0;
  double noise_std_psi = 0.0;
  int scan_rays = 120;
  double scan_max_range = 3.5;
};

struct KinematicLimits {
  double vx_max = 0.3;
  double vy_max = 0.3;
  double omega_max = 1.0;
};

struct WorldConfig {
  std::vector<Rect> corridors;  // union of these = free space
  std::vector<JunctionSpec> junctions;
  std::vector<StoreSpec> stores;
  Rect pickup_zone;
  Pose2D robot_start;
  SensorParams sensors;
  KinematicLimits limits;
  double collision_radius = 0.25;
  double grasp_success_p = 1.0;
  std::uint64_t seed = 0;

  // Derived by validate_config(): exposed boundary of the free-space union.
  std::vector<Segment> walls;

  const JunctionSpec* junction_by_tag(int tag_id) const;
  bool is_junction_tag(int tag_id) const;
};

// Checks config invariants and computes walls. Throws InvalidConfig naming
// the first violated invariant.
void validate_config(WorldConfig& config);

WorldConfig world_config_from_json(const nlohmann::json& j);  // validates
WorldConfig load_world_file(const std::string& path);
nlohmann::ordered_json world_config_to_json(const WorldConfig& config);

// Deterministic, portable RNG. The mt19937_64 output stream is standardized
// and the uniform/gaussian mappings below are explicit bit math, so
// trajectories replay bit-identically for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

  double uniform01();  // [0, 1), 53-bit resolution
  double gaussian();   // standard normal via Box-Muller

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 eng_;
};

struct RangeRay {
  double bearing = 0.0;  // robot frame, strictly increasing across the scan
  double range = 0.0;    // (0, max_range]
};

struct RangeScan {
  std::vector<RangeRay> rays;
  double max_range = 0.0;
};

struct WorldState {
  Pose2D robot;
  std::map<std::string, int> carried;
  std::vector<std::map<std::string, int>> store_stock;  // parallel to config.stores
  double t = 0.0;
  Rng rng{0};
};

WorldState world_from_config(const WorldConfig& config);

// Forward-Euler step; translation is truncated at the first collision-radius
// contact (no sliding), rotation always completes. dt must be in (0, 0.1].
void step(WorldState& state, const WorldConfig& config, const VelocityCmd& cmd,
          double dt);

RangeScan sense_range(const WorldState& state, const WorldConfig& config);

// Advances the rng (dropout + per-detection noise draws).
std::vector<TagDetection> detect_tags(WorldState& state, const WorldConfig& config);

struct GraspResult {
  bool success = false;
  std::string reason;
};

// Throws NotInStore when the robot is outside the store interior.
GraspResult attempt_grasp(WorldState& state, const WorldConfig& config,
                          std::size_t store_index, const std::string& item);

// Minimum distance from a point to any wall segment.
double wall_clearance(const WorldConfig& config, double px, double py);

// First wall hit along a ray, if any within max_range.
std::optional<double> raycast(const WorldConfig& config, double px, double py,
                              double dx, double dy, double max_range);

bool point_in_free_space(const WorldConfig& config, double px, double py);

}  // namespace shopsim
