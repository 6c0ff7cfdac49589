#include "shopsim/orchestrator.hpp"

#include <cmath>

namespace shopsim {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::WallAvoid: return "WallAvoid";
    case Stage::TagApproach: return "TagApproach";
    case Stage::Map: return "Map";
    case Stage::WaitAction: return "WaitAction";
    case Stage::PreEnter: return "PreEnter";
    case Stage::EnterStore: return "EnterStore";
    case Stage::Grasp: return "Grasp";
    case Stage::Pickup: return "Pickup";
  }
  return "?";
}

std::vector<std::string> GateSet::active_names() const {
  std::vector<std::string> out;
  if (wall_avoid) out.emplace_back("wall_avoid");
  if (tag_approach) out.emplace_back("tag_approach");
  if (mapping) out.emplace_back("mapping");
  if (pre_enter) out.emplace_back("pre_enter");
  if (enter_store) out.emplace_back("enter_store");
  if (grasp) out.emplace_back("grasp");
  if (pickup) out.emplace_back("pickup");
  return out;
}

MainController::MainController(OrchestratorParams params, double approach_timeout)
    : params_(params), approach_timeout_(approach_timeout) {}

void MainController::submit_action(const Action& a) { queue_.push_back(a); }

ResolvedAction MainController::resolve_action(const Action& a,
                                              const JunctionContext& ctx) {
  if (ctx.record == nullptr) {
    throw InvalidDirection("no junction context for action " + a.serialize());
  }
  const auto poi = ctx.record->poi_for(a.direction);
  if (!poi) {
    throw InvalidDirection("direction " + std::string(direction_name(a.direction)) +
                           " does not exist at " + ctx.record->id);
  }
  ResolvedAction out;
  out.action = a;
  out.junction_id = ctx.record->id;
  out.poi = *poi;
  if (a.store_action == StoreAction::NoEntry) {
    // NoEntry promotes to the terminal pickup behavior only when this branch
    // is the pickup point and nothing remains to collect.
    out.target = (*poi == kPoiPickupPoint && ctx.remaining_total == 0)
                     ? TargetKind::Pickup
                     : TargetKind::Continue;
  } else {
    out.target = TargetKind::Store;
  }
  return out;
}

void MainController::transition(Stage to, const std::string& reason, double now,
                                std::vector<TransitionEvent>& events) {
  events.push_back({now, state_.stage, to, reason});
  state_.stage = to;
}

MainController::StepOutput MainController::step(const ControllerInputs& in,
                                                const JunctionContext& ctx) {
  StepOutput out;
  const double now = in.now;

  if (!in.junction_tags.empty()) {
    const TagDetection* nearest = &in.junction_tags.front();
    for (const TagDetection& det : in.junction_tags) {
      if (det.range() < nearest->range()) nearest = &det;
    }
    state_.last_tag_time = now;
    state_.last_tag_distance = nearest->range();
    state_.last_tag_id = nearest->tag_id;
  }

  if (!in.g_m) {
    // Master gate off: everything disabled, controller re-armed at WallAvoid.
    if (state_.stage != Stage::WallAvoid) {
      transition(Stage::WallAvoid, "gm_off", now, out.events);
    }
    state_.pending.reset();
    state_.grasp_exiting = false;
    return out;  // all gates low this tick
  }

  switch (state_.stage) {
    case Stage::WallAvoid: {
      const bool tag_recent = now - state_.last_tag_time <= params_.tag_recent_window;
      if (tag_recent && !in.turning && now >= state_.cooldown_until) {
        transition(Stage::TagApproach, "tag_recent", now, out.events);
      }
      break;
    }
    case Stage::TagApproach: {
      const bool tag_lost = now - state_.last_tag_time > params_.tag_recent_window;
      if (in.approach_success == 1) {
        state_.map_started = now;
        transition(Stage::Map, "approach_success", now, out.events);
      } else if (tag_lost && state_.last_tag_distance > params_.d_far) {
        transition(Stage::WallAvoid, "tag_lost_far", now, out.events);
      } else if (in.approach_timed_out &&
                 now - state_.last_tag_time > approach_timeout_) {
        // Close-range loss has no dedicated arc; treat the skill timeout as a
        // failure and recover through wall avoidance.
        transition(Stage::WallAvoid, "approach_timeout", now, out.events);
      }
      break;
    }
    case Stage::Map: {
      if (now - state_.map_started >= params_.T_map) {
        state_.cooldown_until = now + params_.cooldown;
        transition(Stage::WaitAction, "map_done", now, out.events);
        out.decision_requested = true;
      }
      break;
    }
    case Stage::WaitAction: {
      if (!queue_.empty()) {
        const Action a = queue_.front();
        queue_.pop_front();
        try {
          ResolvedAction resolved = resolve_action(a, ctx);
          state_.pending = resolved;
          state_.dir_prev = a.direction;
          transition(Stage::PreEnter, "action_received", now, out.events);
        } catch (const InvalidDirection& err) {
          out.events.push_back({now, state_.stage, state_.stage,
                                std::string("invalid_action: ") + err.what()});
        }
      }
      break;
    }
    case Stage::PreEnter: {
      if (in.pre_enter == SkillResult::Failure) {
        state_.pending.reset();
        transition(Stage::WallAvoid, "pre_enter_failure", now, out.events);
      } else if (in.pre_enter == SkillResult::Success && state_.pending) {
        switch (state_.pending->target) {
          case TargetKind::Pickup:
            transition(Stage::Pickup, "target_pickup", now, out.events);
            break;
          case TargetKind::Continue:
            state_.cooldown_until = now + params_.cooldown;
            state_.pending.reset();
            transition(Stage::WallAvoid, "target_continue", now, out.events);
            break;
          case TargetKind::Store:
            transition(Stage::EnterStore, "target_store", now, out.events);
            break;
        }
      }
      break;
    }
    case Stage::EnterStore: {
      if (in.enter_store == SkillResult::Success) {
        state_.grasp_exiting = false;
        transition(Stage::Grasp, "enter_success", now, out.events);
      } else if (in.enter_store == SkillResult::Failure) {
        state_.pending.reset();
        transition(Stage::WallAvoid, "enter_failure", now, out.events);
      }
      break;
    }
    case Stage::Grasp: {
      if (!state_.grasp_exiting) {
        if (in.grasp_done) state_.grasp_exiting = true;
      } else if (in.post_grasp_done) {
        state_.grasp_exiting = false;
        state_.pending.reset();
        transition(Stage::WallAvoid, "post_grasp_done", now, out.events);
      }
      break;
    }
    case Stage::Pickup:
      break;  // absorbing
  }

  if (state_.stage == Stage::Pickup && !queue_.empty()) {
    // Terminal latch ignores whatever still arrives.
    while (!queue_.empty()) {
      out.events.push_back(
          {now, Stage::Pickup, Stage::Pickup, "action_ignored: " + queue_.front().serialize()});
      queue_.pop_front();
    }
  } else if (state_.stage != Stage::WaitAction && state_.stage != Stage::Map &&
             !queue_.empty()) {
    while (!queue_.empty()) {
      out.events.push_back({now, state_.stage, state_.stage,
                            "action_dropped: " + queue_.front().serialize()});
      queue_.pop_front();
    }
  }

  switch (state_.stage) {
    case Stage::WallAvoid: out.gates.wall_avoid = true; break;
    case Stage::TagApproach: out.gates.tag_approach = true; break;
    case Stage::Map: out.gates.mapping = true; break;
    case Stage::WaitAction: break;  // all-zero: the robot just waits
    case Stage::PreEnter: out.gates.pre_enter = true; break;
    case Stage::EnterStore: out.gates.enter_store = true; break;
    case Stage::Grasp: out.gates.grasp = true; break;
    case Stage::Pickup: out.gates.pickup = true; break;
  }
  return out;
}

VelocityCmd arbitrate(const GateSet& gates, const SkillCommands& cmds) {
  if (gates.count() > 1) {
    throw MultipleGates("more than one skill gate set at once");
  }
  auto pass = [](const std::optional<VelocityCmd>& c) {
    return c.value_or(VelocityCmd::stop());
  };
  if (gates.wall_avoid) return pass(cmds.wall_avoid);
  if (gates.tag_approach) return pass(cmds.tag_approach);
  if (gates.pre_enter) return pass(cmds.pre_enter);
  if (gates.enter_store) return pass(cmds.enter_store);
  if (gates.grasp) return pass(cmds.grasp);
  if (gates.pickup) return pass(cmds.pickup);
  return VelocityCmd::stop();  // mapping or no gate: hold still
}

}  // namespace shopsim
