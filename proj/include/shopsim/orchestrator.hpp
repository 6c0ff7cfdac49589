#pragma once

#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shopsim/action.hpp"
#include "shopsim/semantic_map.hpp"
#include "shopsim/skills.hpp"

namespace shopsim {

enum class Stage {
  WallAvoid,
  TagApproach,
  Map,
  WaitAction,
  PreEnter,
  EnterStore,
  Grasp,
  Pickup,
};

const char* stage_name(Stage s);

// One-hot (or all-zero) skill gate set.
struct GateSet {
  bool wall_avoid = false;
  bool tag_approach = false;
  bool mapping = false;
  bool pre_enter = false;
  bool enter_store = false;
  bool grasp = false;
  bool pickup = false;

  int count() const {
    return int(wall_avoid) + int(tag_approach) + int(mapping) + int(pre_enter) +
           int(enter_store) + int(grasp) + int(pickup);
  }
  std::vector<std::string> active_names() const;
};

enum class TargetKind { Store, Continue, Pickup };

// Action after direction validation and the pickup promotion rule.
struct ResolvedAction {
  Action action;
  TargetKind target = TargetKind::Continue;
  std::string junction_id;
  std::string poi;  // POI listed at the chosen direction
};

struct OrchestratorParams {
  double T_map = 2.0;
  double d_far = 1.5;
  double cooldown = 8.0;
  double tag_recent_window = 0.5;
};

struct ControllerInputs {
  bool g_m = true;
  std::vector<TagDetection> junction_tags;  // this tick's junction detections
  std::optional<int> approach_success;      // last approach status event
  bool approach_timed_out = false;
  std::optional<SkillResult> pre_enter;
  std::optional<SkillResult> enter_store;
  bool grasp_done = false;       // s_g
  bool post_grasp_done = false;  // exit maneuver finished
  bool turning = false;          // wall avoider not in Forward
  double now = 0.0;
};

struct TransitionEvent {
  double t = 0.0;
  Stage from = Stage::WallAvoid;
  Stage to = Stage::WallAvoid;
  std::string reason;
};

struct ControllerState {
  Stage stage = Stage::WallAvoid;
  double cooldown_until = 0.0;
  double map_started = 0.0;
  std::optional<ResolvedAction> pending;
  std::optional<Direction> dir_prev;
  double last_tag_time = -std::numeric_limits<double>::infinity();
  double last_tag_distance = std::numeric_limits<double>::infinity();
  int last_tag_id = -1;
  bool grasp_exiting = false;  // within Grasp: loop done, exit maneuver running
};

// Context handed to the controller for action validation while the robot
// waits at a junction.
struct JunctionContext {
  const JunctionRecord* record = nullptr;
  int remaining_total = 0;
};

// Latched-gate finite state machine. Exactly one skill may command the base
// at any tick; the pickup stage is absorbing.
class MainController {
 public:
  MainController(OrchestratorParams params, double approach_timeout);

  // Queues an action; consumed at tick boundaries (kept while mapping,
  // dropped with an event in stages that cannot accept one).
  void submit_action(const Action& a);

  struct StepOutput {
    GateSet gates;
    std::vector<TransitionEvent> events;
    bool decision_requested = false;  // set when WaitAction is entered
  };

  StepOutput step(const ControllerInputs& in, const JunctionContext& ctx);

  // Direction validation + pickup promotion; throws InvalidDirection.
  // Exposed for tests; step() applies it to queued actions.
  static ResolvedAction resolve_action(const Action& a, const JunctionContext& ctx);

  const ControllerState& state() const { return state_; }
  ControllerState& mutable_state() { return state_; }
  std::size_t queued_actions() const { return queue_.size(); }

 private:
  void transition(Stage to, const std::string& reason, double now,
                  std::vector<TransitionEvent>& events);

  OrchestratorParams params_;
  double approach_timeout_;
  ControllerState state_;
  std::deque<Action> queue_;
};

// Routes the gated skill's command to the base; stop when no gate is set.
// Throws MultipleGates when more than one gate is active.
struct SkillCommands {
  std::optional<VelocityCmd> wall_avoid;
  std::optional<VelocityCmd> tag_approach;
  std::optional<VelocityCmd> pre_enter;
  std::optional<VelocityCmd> enter_store;
  std::optional<VelocityCmd> grasp;
  std::optional<VelocityCmd> pickup;
};

VelocityCmd arbitrate(const GateSet& gates, const SkillCommands& cmds);

}  // namespace shopsim
