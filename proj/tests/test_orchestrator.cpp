#include <doctest.h>

#include <random>

#include "shopsim/orchestrator.hpp"

using namespace shopsim;

namespace {

JunctionRecord junction_lsr() {
  JunctionRecord rec;
  rec.id = "junction_1";
  rec.poi_pairs = {make_poi_pair(Direction::Left, "hamburger store"),
                   make_poi_pair(Direction::Straight, "pickup point"),
                   make_poi_pair(Direction::Right, "corridor")};
  rec.pose = {0, 0, 0};
  return rec;
}

TagDetection det_at(double z, double t, int id = 1) {
  TagDetection d;
  d.tag_id = id;
  d.x = 0;
  d.z = z;
  d.psi = 0;
  d.stamp = t;
  return d;
}

ControllerInputs base_inputs(double now) {
  ControllerInputs in;
  in.now = now;
  return in;
}

MainController fresh(Stage stage, double now = 0.0) {
  MainController c(OrchestratorParams{}, 2.0);
  c.mutable_state().stage = stage;
  c.mutable_state().last_tag_time = now;
  c.mutable_state().last_tag_distance = 1.0;
  return c;
}

}  // namespace

TEST_CASE("wall avoid + recent tag moves to tag approach with a one-hot gate") {
  MainController c(OrchestratorParams{}, 2.0);
  ControllerInputs in = base_inputs(1.0);
  in.junction_tags = {det_at(2.0, 1.0)};
  const auto out = c.step(in, {});
  CHECK(c.state().stage == Stage::TagApproach);
  CHECK(out.gates.tag_approach);
  CHECK(out.gates.count() == 1);
}

TEST_CASE("wall avoid ignores tags while turning or cooling down") {
  SUBCASE("turning blocks the approach") {
    MainController c(OrchestratorParams{}, 2.0);
    ControllerInputs in = base_inputs(1.0);
    in.junction_tags = {det_at(2.0, 1.0)};
    in.turning = true;
    c.step(in, {});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
  SUBCASE("cooldown blocks the approach") {
    MainController c(OrchestratorParams{}, 2.0);
    c.mutable_state().cooldown_until = 5.0;
    ControllerInputs in = base_inputs(1.0);
    in.junction_tags = {det_at(2.0, 1.0)};
    c.step(in, {});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
  SUBCASE("stale tag does not trigger") {
    MainController c(OrchestratorParams{}, 2.0);
    c.mutable_state().last_tag_time = 0.0;
    c.step(base_inputs(1.0), {});  // window is 0.5 s
    CHECK(c.state().stage == Stage::WallAvoid);
  }
}

TEST_CASE("tag approach transitions") {
  SUBCASE("success starts mapping") {
    MainController c = fresh(Stage::TagApproach, 1.0);
    ControllerInputs in = base_inputs(1.0);
    in.approach_success = 1;
    const auto out = c.step(in, {});
    CHECK(c.state().stage == Stage::Map);
    CHECK(out.gates.mapping);
    CHECK(c.state().map_started == doctest::Approx(1.0));
  }
  SUBCASE("tag lost while far falls back to wall avoidance") {
    MainController c = fresh(Stage::TagApproach, 0.0);
    c.mutable_state().last_tag_distance = 3.0;  // beyond d_far
    const auto out = c.step(base_inputs(1.0), {});
    CHECK(c.state().stage == Stage::WallAvoid);
    CHECK(out.gates.wall_avoid);
    REQUIRE(!out.events.empty());
    CHECK(out.events.front().reason == "tag_lost_far");
  }
  SUBCASE("tag lost while near waits for the skill timeout, then recovers") {
    MainController c = fresh(Stage::TagApproach, 0.0);
    c.mutable_state().last_tag_distance = 0.8;  // inside d_far
    ControllerInputs early = base_inputs(1.0);
    early.approach_timed_out = false;
    c.step(early, {});
    CHECK(c.state().stage == Stage::TagApproach);
    ControllerInputs late = base_inputs(2.5);
    late.approach_timed_out = true;
    c.step(late, {});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
  SUBCASE("unconverged success=0 does not transition") {
    MainController c = fresh(Stage::TagApproach, 1.0);
    ControllerInputs in = base_inputs(1.0);
    in.approach_success = 0;
    c.step(in, {});
    CHECK(c.state().stage == Stage::TagApproach);
  }
}

TEST_CASE("mapping runs for T_map then waits for an action and arms the cooldown") {
  MainController c = fresh(Stage::Map, 0.0);
  c.mutable_state().map_started = 0.0;
  c.step(base_inputs(1.0), {});
  CHECK(c.state().stage == Stage::Map);
  const auto out = c.step(base_inputs(2.0), {});
  CHECK(c.state().stage == Stage::WaitAction);
  CHECK(out.decision_requested);
  CHECK(out.gates.count() == 0);  // nothing commands while waiting
  CHECK(c.state().cooldown_until == doctest::Approx(2.0 + OrchestratorParams{}.cooldown));
}

TEST_CASE("action resolution: store, continue, promotion, invalid") {
  const JunctionRecord rec = junction_lsr();
  SUBCASE("store target") {
    const auto r = MainController::resolve_action(
        {Direction::Left, StoreAction::HamburgerStore}, {&rec, 3});
    CHECK(r.target == TargetKind::Store);
    CHECK(r.poi == "hamburger store");
  }
  SUBCASE("no-entry on a pickup branch with remaining order keeps moving") {
    const auto r = MainController::resolve_action(
        {Direction::Straight, StoreAction::NoEntry}, {&rec, 2});
    CHECK(r.target == TargetKind::Continue);
  }
  SUBCASE("no-entry on the pickup branch with an empty order promotes") {
    const auto r = MainController::resolve_action(
        {Direction::Straight, StoreAction::NoEntry}, {&rec, 0});
    CHECK(r.target == TargetKind::Pickup);
  }
  SUBCASE("direction absent at the junction throws") {
    JunctionRecord narrow = rec;
    narrow.poi_pairs = {make_poi_pair(Direction::Left, "cafe")};
    CHECK_THROWS_AS(MainController::resolve_action(
                        {Direction::Right, StoreAction::Cafe}, {&narrow, 1}),
                    InvalidDirection);
  }
}

TEST_CASE("wait action consumes a queued action and pre-enters") {
  MainController c = fresh(Stage::WaitAction, 0.0);
  const JunctionRecord rec = junction_lsr();
  c.submit_action({Direction::Left, StoreAction::HamburgerStore});
  const auto out = c.step(base_inputs(1.0), {&rec, 2});
  CHECK(c.state().stage == Stage::PreEnter);
  CHECK(out.gates.pre_enter);
  REQUIRE(c.state().pending.has_value());
  CHECK(c.state().pending->target == TargetKind::Store);
  CHECK(c.state().dir_prev == Direction::Left);
}

TEST_CASE("invalid queued action is dropped with an event and the controller keeps waiting") {
  MainController c = fresh(Stage::WaitAction, 0.0);
  JunctionRecord rec = junction_lsr();
  rec.poi_pairs = {make_poi_pair(Direction::Left, "cafe")};
  c.submit_action({Direction::Right, StoreAction::Cafe});
  const auto out = c.step(base_inputs(1.0), {&rec, 2});
  CHECK(c.state().stage == Stage::WaitAction);
  REQUIRE(!out.events.empty());
  CHECK(out.events.front().reason.find("invalid_action") == 0);
}

TEST_CASE("pre enter outcomes route by target") {
  const JunctionRecord rec = junction_lsr();
  auto prepared = [&](TargetKind target) {
    MainController c = fresh(Stage::PreEnter, 0.0);
    ResolvedAction pending;
    pending.action = {Direction::Left, target == TargetKind::Store
                                           ? StoreAction::HamburgerStore
                                           : StoreAction::NoEntry};
    pending.target = target;
    pending.junction_id = rec.id;
    pending.poi = "hamburger store";
    c.mutable_state().pending = pending;
    return c;
  };
  SUBCASE("failure recovers to wall avoidance") {
    MainController c = prepared(TargetKind::Store);
    ControllerInputs in = base_inputs(1.0);
    in.pre_enter = SkillResult::Failure;
    c.step(in, {});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
  SUBCASE("success with a store target enters the store") {
    MainController c = prepared(TargetKind::Store);
    ControllerInputs in = base_inputs(1.0);
    in.pre_enter = SkillResult::Success;
    const auto out = c.step(in, {});
    CHECK(c.state().stage == Stage::EnterStore);
    CHECK(out.gates.enter_store);
  }
  SUBCASE("success with continue returns to wall avoidance and arms the cooldown") {
    MainController c = prepared(TargetKind::Continue);
    ControllerInputs in = base_inputs(1.0);
    in.pre_enter = SkillResult::Success;
    c.step(in, {});
    CHECK(c.state().stage == Stage::WallAvoid);
    CHECK(c.state().cooldown_until == doctest::Approx(1.0 + OrchestratorParams{}.cooldown));
  }
  SUBCASE("success with pickup latches the terminal stage") {
    MainController c = prepared(TargetKind::Pickup);
    ControllerInputs in = base_inputs(1.0);
    in.pre_enter = SkillResult::Success;
    const auto out = c.step(in, {});
    CHECK(c.state().stage == Stage::Pickup);
    CHECK(out.gates.pickup);
  }
  SUBCASE("running result holds the stage") {
    MainController c = prepared(TargetKind::Store);
    ControllerInputs in = base_inputs(1.0);
    in.pre_enter = SkillResult::Running;
    c.step(in, {});
    CHECK(c.state().stage == Stage::PreEnter);
  }
}

TEST_CASE("enter store outcomes") {
  SUBCASE("success starts grasping") {
    MainController c = fresh(Stage::EnterStore, 0.0);
    ControllerInputs in = base_inputs(1.0);
    in.enter_store = SkillResult::Success;
    const auto out = c.step(in, {});
    CHECK(c.state().stage == Stage::Grasp);
    CHECK(out.gates.grasp);
  }
  SUBCASE("failure recovers") {
    MainController c = fresh(Stage::EnterStore, 0.0);
    ControllerInputs in = base_inputs(1.0);
    in.enter_store = SkillResult::Failure;
    c.step(in, {});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
}

TEST_CASE("grasp stage: s_g then exit maneuver then wall avoidance") {
  MainController c = fresh(Stage::Grasp, 0.0);
  ControllerInputs sg = base_inputs(1.0);
  sg.grasp_done = true;
  auto out = c.step(sg, {});
  CHECK(c.state().stage == Stage::Grasp);
  CHECK(c.state().grasp_exiting);
  CHECK(out.gates.grasp);

  ControllerInputs done = base_inputs(2.0);
  done.post_grasp_done = true;
  out = c.step(done, {});
  CHECK(c.state().stage == Stage::WallAvoid);
  CHECK(out.gates.wall_avoid);
}

TEST_CASE("master gate off resets everything from every stage") {
  for (int i = 0; i < 8; ++i) {
    MainController c = fresh(static_cast<Stage>(i), 0.0);
    ControllerInputs in = base_inputs(1.0);
    in.g_m = false;
    const auto out = c.step(in, {});
    CHECK(out.gates.count() == 0);
    if (static_cast<Stage>(i) == Stage::Pickup) {
      // gm_off still re-arms at WallAvoid per the master-kill contract
      CHECK(c.state().stage == Stage::WallAvoid);
    } else {
      CHECK(c.state().stage == Stage::WallAvoid);
    }
  }
}

TEST_CASE("pickup stage is absorbing over random input sequences") {
  std::mt19937_64 rng(2024);
  auto u = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  const JunctionRecord rec = junction_lsr();
  for (int trial = 0; trial < 1000; ++trial) {
    MainController c = fresh(Stage::Pickup, 0.0);
    double t = 0.0;
    for (int k = 0; k < 100; ++k) {
      t += 0.1;
      ControllerInputs in = base_inputs(t);
      switch (u(9)) {
        case 0: in.junction_tags = {det_at(0.5 + u(30) / 10.0, t)}; break;
        case 1: in.approach_success = 1; break;
        case 2: in.approach_timed_out = true; break;
        case 3: in.pre_enter = SkillResult::Failure; break;
        case 4: in.pre_enter = SkillResult::Success; break;
        case 5: in.enter_store = SkillResult::Success; break;
        case 6: in.grasp_done = true; break;
        case 7: in.post_grasp_done = true; break;
        case 8: c.submit_action({Direction::Left, StoreAction::NoEntry}); break;
      }
      const auto out = c.step(in, {&rec, 0});
      CHECK(c.state().stage == Stage::Pickup);
      CHECK(out.gates.pickup);
      CHECK(out.gates.count() == 1);
    }
  }
}

TEST_CASE("recovery totality: failures lead back to wall avoidance in one step") {
  // from every non-terminal stage, a failure-ish input or gm toggle recovers
  const JunctionRecord rec = junction_lsr();
  for (int i = 0; i < 7; ++i) {
    const Stage stage = static_cast<Stage>(i);
    MainController c = fresh(stage, 0.0);
    if (stage == Stage::PreEnter) {
      ResolvedAction pending;
      pending.action = {Direction::Left, StoreAction::HamburgerStore};
      pending.target = TargetKind::Store;
      c.mutable_state().pending = pending;
    }
    ControllerInputs in = base_inputs(10.0);
    switch (stage) {
      case Stage::WallAvoid: break;  // already there
      case Stage::TagApproach:
        c.mutable_state().last_tag_distance = 5.0;
        break;  // tag lost far
      case Stage::Map:
      case Stage::WaitAction:
        in.g_m = false;  // no skill failure exists; the master gate recovers
        break;
      case Stage::PreEnter: in.pre_enter = SkillResult::Failure; break;
      case Stage::EnterStore: in.enter_store = SkillResult::Failure; break;
      case Stage::Grasp: in.g_m = false; break;
      default: break;
    }
    c.step(in, {&rec, 1});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
}

TEST_CASE("cooldown: no tag re-approach right after mapping") {
  MainController c = fresh(Stage::Map, 0.0);
  c.mutable_state().map_started = 0.0;
  c.step(base_inputs(2.0), {});  // -> WaitAction, cooldown armed until 10.0
  REQUIRE(c.state().stage == Stage::WaitAction);
  const JunctionRecord rec = junction_lsr();
  c.submit_action({Direction::Right, StoreAction::NoEntry});
  ControllerInputs in = base_inputs(2.1);
  c.step(in, {&rec, 1});
  REQUIRE(c.state().stage == Stage::PreEnter);
  ControllerInputs ok = base_inputs(2.2);
  ok.pre_enter = SkillResult::Success;
  c.step(ok, {&rec, 1});
  REQUIRE(c.state().stage == Stage::WallAvoid);

  // the same tag stays visible; within the cooldown nothing happens
  for (double t = 2.3; t < 10.0; t += 0.5) {
    ControllerInputs vis = base_inputs(t);
    vis.junction_tags = {det_at(1.0, t)};
    c.step(vis, {&rec, 1});
    CHECK(c.state().stage == Stage::WallAvoid);
  }
  ControllerInputs after = base_inputs(10.5);
  after.junction_tags = {det_at(1.0, 10.5)};
  c.step(after, {&rec, 1});
  CHECK(c.state().stage == Stage::TagApproach);
}

TEST_CASE("actions outside Map/WaitAction are dropped with an event") {
  MainController c = fresh(Stage::WallAvoid, 0.0);
  c.mutable_state().last_tag_time = -100.0;  // no approach trigger
  c.submit_action({Direction::Left, StoreAction::NoEntry});
  const auto out = c.step(base_inputs(1.0), {});
  CHECK(c.queued_actions() == 0);
  bool dropped = false;
  for (const auto& e : out.events) dropped |= e.reason.find("action_dropped") == 0;
  CHECK(dropped);
}

TEST_CASE("action queued while mapping is consumed at wait action") {
  MainController c = fresh(Stage::Map, 0.0);
  c.mutable_state().map_started = 0.0;
  c.submit_action({Direction::Right, StoreAction::NoEntry});
  c.step(base_inputs(0.5), {});
  CHECK(c.queued_actions() == 1);  // kept while mapping
  const JunctionRecord rec = junction_lsr();
  c.step(base_inputs(2.0), {&rec, 1});  // Map -> WaitAction
  c.step(base_inputs(2.1), {&rec, 1});  // consume
  CHECK(c.state().stage == Stage::PreEnter);
}

TEST_CASE("arbitrate routes the gated skill and fails loudly on multiple gates") {
  SkillCommands cmds;
  cmds.wall_avoid = VelocityCmd{0.2, 0, 0};
  cmds.pickup = VelocityCmd{0.1, 0, 0};
  GateSet gates;
  SUBCASE("single gate passes through") {
    gates.wall_avoid = true;
    CHECK(arbitrate(gates, cmds).vx == doctest::Approx(0.2));
  }
  SUBCASE("no gate yields stop") {
    CHECK(arbitrate(gates, cmds).is_stop());
  }
  SUBCASE("two gates throw") {
    gates.wall_avoid = true;
    gates.pickup = true;
    CHECK_THROWS_AS(arbitrate(gates, cmds), MultipleGates);
  }
  SUBCASE("gated skill without a command stops") {
    gates.tag_approach = true;
    CHECK(arbitrate(gates, cmds).is_stop());
  }
}
