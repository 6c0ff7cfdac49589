#include "shopsim/geometry.hpp"

#include <algorithm>

namespace shopsim {

double normalize_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

double clamp(double value, double limit) {
  return std::max(-limit, std::min(limit, value));
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {a.x + c * b.x - s * b.y,
          a.y + s * b.x + c * b.y,
          normalize_angle(a.yaw + b.yaw)};
}

Pose2D inverse(const Pose2D& p) {
  const double c = std::cos(p.yaw);
  const double s = std::sin(p.yaw);
  return {-(c * p.x + s * p.y),
          -(-s * p.x + c * p.y),
          normalize_angle(-p.yaw)};
}

TagGeometry relative_tag(const Pose2D& robot, const Pose2D& tag) {
  const double dx = tag.x - robot.x;
  const double dy = tag.y - robot.y;
  const double c = std::cos(robot.yaw);
  const double s = std::sin(robot.yaw);
  const double forward = c * dx + s * dy;
  const double left = -s * dx + c * dy;
  if (forward <= 0.0) {
    throw NotInFront("tag is not in front of the robot");
  }
  // A tag seen head-on has its face normal pointing back at the camera,
  // hence the extra pi.
  return {-left, forward, normalize_angle(tag.yaw - robot.yaw - kPi)};
}

}  // namespace shopsim
