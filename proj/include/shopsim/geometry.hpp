#pragma once

#include <cmath>

#include "shopsim/errors.hpp"

namespace shopsim {

inline constexpr double kPi = 3.14159265358979323846;

// Normalizes an angle into (-pi, pi].
double normalize_angle(double a);

// Symmetric saturation: result lies in [-limit, +limit]. limit must be >= 0.
double clamp(double value, double limit);

// Planar pose in the world frame. yaw is kept normalized in (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  bool operator==(const Pose2D&) const = default;
};

// a ⊕ b: b expressed in a's frame, mapped into the world frame.
Pose2D compose(const Pose2D& a, const Pose2D& b);

// Group inverse: compose(p, inverse(p)) == identity.
Pose2D inverse(const Pose2D& p);

// Base velocity command in the robot frame.
// vx forward, vy lateral (leftward positive), omega counter-clockwise.
struct VelocityCmd {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  static VelocityCmd stop() { return {}; }
  bool is_stop() const { return vx == 0.0 && vy == 0.0 && omega == 0.0; }
  bool operator==(const VelocityCmd&) const = default;
};

// Camera-frame tag measurement.
//   x   lateral offset, rightward positive
//   z   forward distance, always > 0
//   psi relative yaw of the tag plane (0 when seen head-on)
struct TagDetection {
  int tag_id = -1;
  double x = 0.0;
  double z = 0.0;
  double psi = 0.0;
  double stamp = 0.0;

  double range() const { return std::hypot(x, z); }
};

// Geometry-only part of a detection (no id / stamp).
struct TagGeometry {
  double x = 0.0;
  double z = 0.0;
  double psi = 0.0;
};

// Measurement model: where does `tag` appear in the camera frame of `robot`?
// Throws NotInFront when the forward component is <= 0.
TagGeometry relative_tag(const Pose2D& robot, const Pose2D& tag);

}  // namespace shopsim
