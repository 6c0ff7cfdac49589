#include <doctest.h>

#include <cmath>

#include "shopsim/costmap.hpp"
#include "shopsim/skills.hpp"
#include "shopsim/world.hpp"

using namespace shopsim;

namespace {

RangeScan clear_scan(int n = 120, double max_range = 3.5) {
  RangeScan scan;
  scan.max_range = max_range;
  for (int k = 0; k < n; ++k) scan.rays.push_back({-kPi + 2 * kPi * k / n, max_range});
  return scan;
}

OccupancyGrid clear_grid() { return build_costmap(clear_scan(), {}); }

OccupancyGrid grid_with_wall(double dist) {
  OccupancyGrid grid = clear_grid();
  for (double y = -0.4; y <= 0.4; y += grid.resolution) {
    int ix, iy;
    if (grid.index_of(dist, y, ix, iy)) grid.at(ix, iy) = Cell::Occupied;
  }
  return grid;
}

}  // namespace

TEST_CASE("wall avoider: clear grid cruises forward") {
  WallAvoiderState s;
  const WallAvoiderParams p;
  const auto out = wall_avoider_step(s, clear_grid(), true, p, 0.0);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->vx == doctest::Approx(p.v_f));
  CHECK(out.cmd->omega == doctest::Approx(0.0));
  CHECK(s.mode == AvoidMode::Forward);
}

TEST_CASE("wall avoider: obstacle inside d_safe enters Turn90") {
  WallAvoiderState s;
  const WallAvoiderParams p;
  const auto out = wall_avoider_step(s, grid_with_wall(p.d_safe / 2), true, p, 0.0);
  CHECK(s.mode == AvoidMode::Turn90);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->vx == doctest::Approx(0.0));
}

TEST_CASE("wall avoider: gate off stops once and resets to Forward") {
  WallAvoiderState s;
  const WallAvoiderParams p;
  wall_avoider_step(s, grid_with_wall(0.2), true, p, 0.0);
  REQUIRE(s.mode == AvoidMode::Turn90);
  auto out = wall_avoider_step(s, clear_grid(), false, p, 0.05);
  CHECK(s.mode == AvoidMode::Forward);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->is_stop());
  // subsequent gated-off ticks stay silent
  for (int i = 0; i < 5; ++i) {
    out = wall_avoider_step(s, clear_grid(), false, p, 0.1 + i * 0.05);
    CHECK(!out.cmd.has_value());
  }
}

TEST_CASE("wall avoider: timed 90 turn then Forward when clear") {
  WallAvoiderState s;
  const WallAvoiderParams p;
  double t = 0.0;
  wall_avoider_step(s, grid_with_wall(0.3), true, p, t);
  REQUIRE(s.mode == AvoidMode::Turn90);
  const int sign = s.turn_sign;
  const double turn_time = p.theta_90 / p.omega;
  while (t < turn_time + 0.2) {
    t += 0.05;
    const auto out = wall_avoider_step(s, clear_grid(), true, p, t);
    if (s.mode == AvoidMode::Turn90) {
      REQUIRE(out.cmd.has_value());
      CHECK(out.cmd->omega == doctest::Approx(sign * p.omega));
    }
  }
  CHECK(s.mode == AvoidMode::Forward);
}

TEST_CASE("wall avoider: still blocked after the 90 turn escalates to Turn180") {
  WallAvoiderState s;
  const WallAvoiderParams p;
  double t = 0.0;
  wall_avoider_step(s, grid_with_wall(0.3), true, p, t);
  REQUIRE(s.mode == AvoidMode::Turn90);
  const double turn_time = p.theta_90 / p.omega;
  while (s.mode == AvoidMode::Turn90 && t < turn_time + 1.0) {
    t += 0.05;
    wall_avoider_step(s, grid_with_wall(0.3), true, p, t);
  }
  CHECK(s.mode == AvoidMode::Turn180);
}

TEST_CASE("tag approach: proportional law with saturation") {
  TagApproachState s;
  TagApproachParams p;
  p.x_star = 0.0;
  p.d_star = 0.5;
  p.k_x = p.k_z = 1.0;
  p.k_psi = 1.0;
  p.vx_max = p.vy_max = p.omega_max = 0.3;
  TagDetection det;
  det.tag_id = 1;
  det.x = 0.5;
  det.z = 2.0;
  det.psi = 0.0;
  det.stamp = 0.0;
  const auto out = tag_approach_step(s, det, true, p, 0.0);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->vx == doctest::Approx(0.3));   // clamped from 1.5
  CHECK(out.cmd->vy == doctest::Approx(-0.3));  // clamped from -0.5
  CHECK(out.cmd->omega == doctest::Approx(0.0));
  CHECK(out.success == 0);
}

TEST_CASE("tag approach: aligned detection starts the timed advance and succeeds once") {
  TagApproachState s;
  const TagApproachParams p;
  TagDetection det;
  det.tag_id = 1;
  det.x = p.x_star;
  det.z = p.d_star;
  det.psi = 0.0;
  double t = 0.0;
  auto out = tag_approach_step(s, det, true, p, t);
  CHECK(std::string(out.phase) == "advance");
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->vx == doctest::Approx(std::min(p.v_adv, p.vx_max)));

  const double advance_T = p.d_adv / std::min(p.v_adv, p.vx_max);
  int successes = 0;
  while (t < advance_T + 0.5) {
    t += 0.05;
    out = tag_approach_step(s, det, true, p, t);
    if (out.success == 1) ++successes;
  }
  CHECK(successes == 1);
  CHECK(s.adv_done);
}

TEST_CASE("tag approach: zero error falls through translation to rotation to advance") {
  TagApproachState s;
  TagApproachParams p;
  TagDetection det;
  det.x = p.x_star;
  det.z = p.d_star;
  det.psi = 0.2;  // only yaw off
  auto out = tag_approach_step(s, det, true, p, 0.0);
  CHECK(std::string(out.phase) == "rotate");
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->vx == doctest::Approx(0.0));
  CHECK(out.cmd->omega == doctest::Approx(clamp(p.k_psi * 0.2, p.omega_max)));
}

TEST_CASE("tag approach: detection loss beyond the timeout reports failure") {
  TagApproachState s;
  const TagApproachParams p;
  TagDetection det;
  det.x = 1.0;
  det.z = 2.0;
  tag_approach_step(s, det, true, p, 0.0);
  const auto out = tag_approach_step(s, std::nullopt, true, p, p.timeout + 0.1);
  CHECK(out.success == 0);
  CHECK(out.timed_out);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->is_stop());
}

TEST_CASE("tag approach: falling gate stops and publishes success 0") {
  TagApproachState s;
  const TagApproachParams p;
  TagDetection det;
  det.x = 1.0;
  det.z = 2.0;
  tag_approach_step(s, det, true, p, 0.0);
  const auto out = tag_approach_step(s, det, false, p, 0.05);
  CHECK(out.success == 0);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->is_stop());
  CHECK(!s.active);
  // and stays quiet afterwards
  const auto idle = tag_approach_step(s, det, false, p, 0.1);
  CHECK(!idle.cmd.has_value());
  CHECK(!idle.success.has_value());
}

TEST_CASE("tag approach success is unique per activation") {
  TagApproachState s;
  const TagApproachParams p;
  TagDetection det;
  det.x = 0.0;
  det.z = p.d_star;
  det.psi = 0.0;
  double t = 0.0;
  int successes = 0;
  // run a full activation cycle twice
  for (int cycle = 0; cycle < 2; ++cycle) {
    for (int i = 0; i < 100; ++i) {
      t += 0.05;
      const auto out = tag_approach_step(s, det, true, p, t);
      if (out.success == 1) ++successes;
    }
    t += 0.05;
    tag_approach_step(s, det, false, p, t);
  }
  CHECK(successes == 2);  // exactly one per activation
}

TEST_CASE("pre enter: already on heading is an immediate success") {
  PreEnterState s;
  const PreEnterParams p;
  const Pose2D robot{0, 0, kPi / 2 + 0.02};  // within tau_psi of Left target
  const auto out = pre_enter_step(s, 0.0, Direction::Left, robot, true, p, 0.0);
  CHECK(out.result == SkillResult::Success);
}

TEST_CASE("pre enter: rotates a quarter turn then succeeds") {
  PreEnterState s;
  const PreEnterParams p;
  Pose2D robot{0, 0, 0};
  double t = 0.0;
  SkillResult result = SkillResult::Running;
  for (int i = 0; i < 400 && result == SkillResult::Running; ++i) {
    const auto out = pre_enter_step(s, 0.0, Direction::Left, robot, true, p, t);
    result = out.result;
    if (out.cmd) robot.yaw = normalize_angle(robot.yaw + out.cmd->omega * 0.05);
    t += 0.05;
  }
  CHECK(result == SkillResult::Success);
  CHECK(std::abs(normalize_angle(robot.yaw - kPi / 2)) <= p.tau_psi);
}

TEST_CASE("pre enter: never converging robot fails at the timeout") {
  PreEnterState s;
  const PreEnterParams p;
  const Pose2D stuck{0, 0, kPi};  // feedback says it never moves
  double t = 0.0;
  SkillResult result = SkillResult::Running;
  while (t < p.timeout + 1.0 && result == SkillResult::Running) {
    result = pre_enter_step(s, 0.0, Direction::Straight, stuck, true, p, t).result;
    t += 0.05;
  }
  CHECK(result == SkillResult::Failure);
}

TEST_CASE("enter store: fixture rollout reaches the hamburger store interior") {
  WorldConfig cfg = load_world_file(SHOPSIM_SOURCE_DIR "/worlds/paper_fig3.json");
  WorldState world = world_from_config(cfg);
  // stance after approaching the first junction and pre-entering Left (south)
  world.robot = {8.25, 0.0, -kPi / 2};
  const StoreSpec& store = cfg.stores[0];
  REQUIRE(store.category == "hamburger store");

  EnterStoreState s;
  const EnterStoreParams p;
  SkillResult result = SkillResult::Running;
  while (world.t < p.timeout && result == SkillResult::Running) {
    const RangeScan scan = sense_range(world, cfg);
    const OccupancyGrid grid = build_costmap(scan, {});
    const auto out = enter_store_step(s, store.entrance, store.interior, world.robot,
                                      grid, true, p, world.t);
    result = out.result;
    step(world, cfg, out.cmd.value_or(VelocityCmd::stop()), 0.05);
  }
  CHECK(result == SkillResult::Success);
  CHECK(store.interior.contains(world.robot.x, world.robot.y));
}

TEST_CASE("enter store: blocked doorway fails fast") {
  EnterStoreState s;
  const EnterStoreParams p;
  const Pose2D entrance{0, 1, kPi / 2};
  const Rect interior{-1, 2, 1, 4};
  const auto out = enter_store_step(s, entrance, interior, {0, 0, kPi / 2},
                                    grid_with_wall(0.2), true, p, 0.0);
  CHECK(out.result == SkillResult::Failure);
}

TEST_CASE("enter store: dropped gate stops without a result") {
  EnterStoreState s;
  const EnterStoreParams p;
  const Pose2D entrance{0, 1, kPi / 2};
  const Rect interior{-1, 2, 1, 4};
  enter_store_step(s, entrance, interior, {0, 0, kPi / 2}, clear_grid(), true, p, 0.0);
  const auto out = enter_store_step(s, entrance, interior, {0, 0.1, kPi / 2},
                                    clear_grid(), false, p, 0.05);
  CHECK(out.result == SkillResult::Running);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->is_stop());
}

TEST_CASE("grasp loop: plans min(stock, remaining) per item") {
  GraspLoopState s;
  const GraspLoopParams p;
  OrderList rem;
  rem.hamburger = 2;
  std::map<std::string, int> stock{{"hamburger", 5}};
  double t = 0.0;
  int requests = 0;
  bool done = false;
  while (t < 10.0 && !done) {
    const auto out = grasp_loop_step(s, stock, rem, true, p, t);
    if (out.request) {
      CHECK(*out.request == "hamburger");
      ++requests;
    }
    done = out.s_g;
    t += 0.05;
  }
  CHECK(requests == 2);
  CHECK(done);
}

TEST_CASE("grasp loop: capability mismatch completes immediately") {
  GraspLoopState s;
  const GraspLoopParams p;
  OrderList rem;
  rem.medicine = 1;
  const auto out = grasp_loop_step(s, {{"hamburger", 5}}, rem, true, p, 0.0);
  CHECK(out.s_g);
  CHECK(!out.request.has_value());
}

TEST_CASE("grasp loop: stock short of the order issues what it can") {
  GraspLoopState s;
  const GraspLoopParams p;
  OrderList rem;
  rem.hamburger = 3;
  double t = 0.0;
  int requests = 0;
  bool done = false;
  while (t < 10.0 && !done) {
    const auto out = grasp_loop_step(s, {{"hamburger", 1}}, rem, true, p, t);
    requests += out.request ? 1 : 0;
    done = out.s_g;
    t += 0.05;
  }
  CHECK(requests == 1);
  CHECK(done);
}

TEST_CASE("post grasp: entry turn Left exits clockwise, Straight counter-clockwise") {
  const PostGraspParams p;
  {
    PostGraspState s;
    const auto out = post_grasp_step(s, Direction::Left, true, p, 0.0);
    REQUIRE(out.cmd.has_value());
    CHECK(out.cmd->omega == doctest::Approx(-p.omega));
  }
  {
    PostGraspState s;
    const auto out = post_grasp_step(s, Direction::Straight, true, p, 0.0);
    REQUIRE(out.cmd.has_value());
    CHECK(out.cmd->omega == doctest::Approx(+p.omega));
  }
}

TEST_CASE("post grasp: pi turn then timed drive out, then done") {
  PostGraspState s;
  const PostGraspParams p;
  double t = 0.0;
  bool saw_backup = false;
  bool done = false;
  while (t < kPi / p.omega + p.t_backup + 1.0 && !done) {
    const auto out = post_grasp_step(s, Direction::Left, true, p, t);
    if (out.cmd && out.cmd->vx > 0) saw_backup = true;
    done = out.done;
    t += 0.05;
  }
  CHECK(saw_backup);
  CHECK(done);
}

TEST_CASE("post grasp: gate drop resets mid-maneuver") {
  PostGraspState s;
  const PostGraspParams p;
  post_grasp_step(s, Direction::Left, true, p, 0.0);
  const auto out = post_grasp_step(s, Direction::Left, false, p, 0.05);
  REQUIRE(out.cmd.has_value());
  CHECK(out.cmd->is_stop());
  CHECK(!out.done);
  CHECK(!s.active);
}

TEST_CASE("pickup: inside the zone holds a zero command forever") {
  PickupState s;
  const PickupParams p;
  const Rect zone{-1, -1, 1, 1};
  for (int i = 0; i < 10; ++i) {
    const auto cmd = pickup_step(s, zone, {0, 0, 0.3}, true, p);
    REQUIRE(cmd.has_value());
    CHECK(cmd->is_stop());
  }
}

TEST_CASE("pickup: one meter out, clear path, reaches the zone") {
  WorldConfig cfg;
  cfg.corridors.push_back({-1, -2, 6, 2});
  cfg.pickup_zone = {3, -0.5, 4, 0.5};
  cfg.robot_start = {2.2, 0.2, 0.3};
  validate_config(cfg);
  WorldState world = world_from_config(cfg);
  PickupState s;
  const PickupParams p;
  while (world.t < 30.0 && !cfg.pickup_zone.contains(world.robot.x, world.robot.y)) {
    const auto cmd = pickup_step(s, cfg.pickup_zone, world.robot, true, p);
    step(world, cfg, cmd.value_or(VelocityCmd::stop()), 0.05);
  }
  CHECK(cfg.pickup_zone.contains(world.robot.x, world.robot.y));
}

TEST_CASE("skill steps are pure: equal state and inputs give equal outputs") {
  TagApproachState s1;
  TagApproachParams p;
  TagDetection det;
  det.x = 0.4;
  det.z = 1.4;
  det.psi = 0.1;
  tag_approach_step(s1, det, true, p, 0.0);
  TagApproachState s2 = s1;
  det.z = 1.2;
  const auto a = tag_approach_step(s1, det, true, p, 0.05);
  const auto b = tag_approach_step(s2, det, true, p, 0.05);
  REQUIRE(a.cmd.has_value());
  REQUIRE(b.cmd.has_value());
  CHECK(a.cmd->vx == b.cmd->vx);
  CHECK(a.cmd->vy == b.cmd->vy);
  CHECK(a.cmd->omega == b.cmd->omega);
  CHECK(a.success == b.success);
}
