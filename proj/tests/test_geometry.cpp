#include <doctest.h>

#include <cmath>
#include <random>

#include "shopsim/geometry.hpp"

using namespace shopsim;

namespace {
Pose2D random_pose(std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  return {u(-10, 10), u(-10, 10), normalize_angle(u(-10, 10))};
}
}  // namespace

TEST_CASE("angle normalization lands in (-pi, pi]") {
  CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(2 * kPi + 0.25) == doctest::Approx(0.25));
  for (double a = -20.0; a < 20.0; a += 0.137) {
    const double n = normalize_angle(a);
    CHECK(n > -kPi - 1e-12);
    CHECK(n <= kPi + 1e-12);
    CHECK(std::abs(std::remainder(n - a, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("compose: identity is neutral") {
  const Pose2D p{1.2, -3.4, 0.7};
  const Pose2D id{};
  const Pose2D r = compose(id, p);
  CHECK(r.x == doctest::Approx(p.x));
  CHECK(r.y == doctest::Approx(p.y));
  CHECK(r.yaw == doctest::Approx(p.yaw));
}

TEST_CASE("compose: quarter-turn offset") {
  // (1,0,pi/2) + one meter forward lands at (1,1) still facing +y.
  const Pose2D r = compose({1, 0, kPi / 2}, {1, 0, 0});
  CHECK(r.x == doctest::Approx(1.0));
  CHECK(r.y == doctest::Approx(1.0));
  CHECK(r.yaw == doctest::Approx(kPi / 2));
}

TEST_CASE("compose: inverse gives identity") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Pose2D p = random_pose(rng);
    const Pose2D r = compose(p, inverse(p));
    CHECK(std::abs(r.x) < 1e-9);
    CHECK(std::abs(r.y) < 1e-9);
    CHECK(std::abs(normalize_angle(r.yaw)) < 1e-9);
  }
}

TEST_CASE("compose is associative") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose2D a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose2D lhs = compose(compose(a, b), c);
    const Pose2D rhs = compose(a, compose(b, c));
    CHECK(lhs.x == doctest::Approx(rhs.x).epsilon(1e-9));
    CHECK(lhs.y == doctest::Approx(rhs.y).epsilon(1e-9));
    CHECK(std::abs(normalize_angle(lhs.yaw - rhs.yaw)) < 1e-9);
  }
}

TEST_CASE("relative_tag: head-on symmetry") {
  const TagGeometry g = relative_tag({0, 0, 0}, {2, 0, kPi});
  CHECK(g.x == doctest::Approx(0.0));
  CHECK(g.z == doctest::Approx(2.0));
  CHECK(g.psi == doctest::Approx(0.0));
}

TEST_CASE("relative_tag: tag left of boresight reads negative x") {
  const TagGeometry g = relative_tag({0, 0, 0}, {2, 0.5, kPi});
  CHECK(g.x == doctest::Approx(-0.5));
  CHECK(g.z == doctest::Approx(2.0));
  CHECK(g.psi == doctest::Approx(0.0));
}

TEST_CASE("relative_tag: rotated frame reduces to the head-on case") {
  const TagGeometry g = relative_tag({0, 0, kPi / 2}, {0, 2, -kPi / 2});
  CHECK(g.x == doctest::Approx(0.0));
  CHECK(g.z == doctest::Approx(2.0));
  CHECK(g.psi == doctest::Approx(0.0));
}

TEST_CASE("relative_tag refuses targets behind the robot") {
  CHECK_THROWS_AS(relative_tag({0, 0, 0}, {-1, 0, 0}), NotInFront);
}

TEST_CASE("relative_tag is consistent with compose") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    const Pose2D robot = random_pose(rng);
    const Pose2D tag = random_pose(rng);
    TagGeometry g;
    try {
      g = relative_tag(robot, tag);
    } catch (const NotInFront&) {
      continue;
    }
    // Re-embed the measurement in the robot frame: forward z, leftward -x.
    const Pose2D recovered = compose(robot, {g.z, -g.x, normalize_angle(g.psi + kPi)});
    CHECK(std::abs(recovered.x - tag.x) < 1e-9);
    CHECK(std::abs(recovered.y - tag.y) < 1e-9);
    CHECK(std::abs(normalize_angle(recovered.yaw - tag.yaw)) < 1e-9);
  }
}

TEST_CASE("clamp saturates symmetrically") {
  CHECK(clamp(0.7, 0.5) == doctest::Approx(0.5));
  CHECK(clamp(-0.2, 0.5) == doctest::Approx(-0.2));
  CHECK(clamp(-3.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("clamp is idempotent and odd") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const double v = -5.0 + 10.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    const double l = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    CHECK(clamp(clamp(v, l), l) == doctest::Approx(clamp(v, l)));
    CHECK(clamp(-v, l) == doctest::Approx(-clamp(v, l)));
  }
}
