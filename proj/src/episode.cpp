#include "shopsim/episode.hpp"

#include <cmath>
#include <cstdio>

namespace shopsim {

namespace fs = std::filesystem;

EpisodeRunner::EpisodeRunner(WorldConfig config, OrderList order,
                             EpisodeParams params, LlmTransport* llm)
    : config_(std::move(config)),
      order_(order),
      params_(std::move(params)),
      llm_(llm),
      controller_(params_.orchestrator, params_.tag_approach.timeout) {
  config_.seed = params_.seed;
  state_ = world_from_config(config_);
  params_.wall_avoider.slice = params_.slice;
  params_.enter_store.slice = params_.slice;

  if (!params_.out_dir.empty()) {
    fs::create_directories(params_.out_dir);
    std::ofstream world_out(params_.out_dir / "world.json");
    world_out << world_config_to_json(config_).dump(2) << "\n";
    std::ofstream order_out(params_.out_dir / "order.json");
    order_out << save_order(order_);
    history_out_.open(params_.out_dir / "history.jsonl");
    decisions_out_.open(params_.out_dir / "decisions.jsonl");
    transitions_out_.open(params_.out_dir / "transitions.jsonl");
    gates_out_.open(params_.out_dir / "gates.jsonl");
    trajectory_out_.open(params_.out_dir / "trajectory.csv");
    trajectory_out_ << "t,x,y,yaw\n";
  }
}

EpisodeRunner::~EpisodeRunner() = default;

void EpisodeRunner::log_history(HistoryEvent event) {
  if (history_out_.is_open()) {
    history_out_ << event.to_json().dump() << "\n";
    history_out_.flush();
  }
  history_.push_back(std::move(event));
}

std::size_t EpisodeRunner::resolve_store(const std::string& category) const {
  std::size_t best = SemanticMap::npos;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < config_.stores.size(); ++i) {
    if (config_.stores[i].category != category) continue;
    const double d = std::hypot(config_.stores[i].entrance.x - state_.robot.x,
                                config_.stores[i].entrance.y - state_.robot.y);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

void EpisodeRunner::request_decision() {
  const JunctionRecord* here = map_.find(current_junction_id_);
  if (here == nullptr) return;

  DecisionContext ctx;
  ctx.map = map_;
  ctx.junction = *here;
  ctx.remaining = remaining(order_, state_.carried);
  ctx.visited = visited_instances(history_);
  ctx.tried = tried_branches(history_);
  for (const auto& e : history_) ctx.history_lines.push_back(e.to_line());

  nlohmann::ordered_json rec;
  rec["t"] = state_.t;
  rec["junction_id"] = current_junction_id_;
  rec["policy"] = params_.policy;
  rec["context"] = ctx.to_json();

  Action action{};
  if (params_.policy == "llm" && llm_ != nullptr) {
    const DecisionOutcome outcome = decide_llm(*llm_, ctx, caps_, params_.llm_retries);
    action = outcome.action;
    rec["attempts"] = outcome.attempts;
    rec["fallback"] = outcome.fallback;
    rec["exchanges"] = nlohmann::ordered_json::array();
    for (const auto& [req, resp] : outcome.exchanges) {
      rec["exchanges"].push_back({{"request", req}, {"response", resp}});
    }
  } else {
    action = decide_oracle(ctx, caps_);
  }
  rec["action"] = action.serialize();
  if (decisions_out_.is_open()) {
    decisions_out_ << rec.dump() << "\n";
    decisions_out_.flush();
  }
  log_history({state_.t, "decision", current_junction_id_, action.direction,
               std::nullopt, action.serialize()});
  controller_.submit_action(action);
}

void EpisodeRunner::handle_events(const std::vector<TransitionEvent>& events) {
  for (const TransitionEvent& ev : events) {
    if (transitions_out_.is_open()) {
      nlohmann::ordered_json j;
      j["t"] = ev.t;
      j["from"] = stage_name(ev.from);
      j["to"] = stage_name(ev.to);
      j["reason"] = ev.reason;
      j["gates"] = gates_.active_names();
      transitions_out_ << j.dump() << "\n";
    }
    const auto& pending = controller_.state().pending;
    if (ev.reason == "approach_success") {
      // Semantic mapping: fold the observed signboard into the map.
      const JunctionSpec* spec = config_.junction_by_tag(controller_.state().last_tag_id);
      if (spec != nullptr) {
        JunctionObservation obs;
        obs.pose = state_.robot;
        obs.tag_id = spec->tag_id;
        for (const auto& e : spec->signboard) {
          obs.poi_pairs.push_back(make_poi_pair(e.direction, e.poi));
        }
        const JunctionRecord& rec = map_.record(obs);
        current_junction_id_ = rec.id;
        log_history({ev.t, "junction_visit", rec.id, std::nullopt, std::nullopt,
                     "tag " + std::to_string(spec->tag_id)});
      }
    } else if (ev.reason == "target_store" || ev.reason == "target_continue" ||
               ev.reason == "target_pickup") {
      if (pending) {
        log_history({ev.t, "turn", pending->junction_id, pending->action.direction,
                     pending->poi, ev.reason});
      }
      if (ev.reason == "target_store" && pending) {
        const std::size_t idx = resolve_store(store_action_poi(pending->action.store_action));
        target_store_ = idx == SemanticMap::npos ? std::nullopt
                                                 : std::optional<std::size_t>(idx);
      }
      if (ev.reason == "target_pickup" && pending) {
        log_history({ev.t, "pickup", pending->junction_id, pending->action.direction,
                     std::string(kPoiPickupPoint), "terminal pickup latched"});
      }
    } else if (ev.reason == "enter_success") {
      if (pending && target_store_) {
        log_history({ev.t, "store_entry", pending->junction_id,
                     pending->action.direction,
                     config_.stores[*target_store_].category, "entered"});
      }
    }
  }
}

bool EpisodeRunner::tick() {
  if (outcome_ != EpisodeOutcome::Running) return false;

  const double t = state_.t;
  const RangeScan scan = sense_range(state_, config_);
  const OccupancyGrid grid = build_costmap(scan, params_.costmap);
  const std::vector<TagDetection> dets = detect_tags(state_, config_);

  std::vector<TagDetection> junction_dets;
  for (const TagDetection& d : dets) {
    if (config_.is_junction_tag(d.tag_id)) junction_dets.push_back(d);
  }
  std::optional<TagDetection> nearest;
  for (const TagDetection& d : junction_dets) {
    if (!nearest || d.range() < nearest->range()) nearest = d;
  }

  ControllerInputs inputs = feedback_;
  inputs.g_m = true;
  inputs.junction_tags = junction_dets;
  inputs.turning = avoid_state_.mode != AvoidMode::Forward;
  inputs.now = t;

  const JunctionRecord* here = map_.find(current_junction_id_);
  JunctionContext ctx{here, remaining(order_, state_.carried).total()};
  const auto ctrl = controller_.step(inputs, ctx);
  gates_ = ctrl.gates;
  handle_events(ctrl.events);
  if (ctrl.decision_requested) request_decision();

  if (gates_out_.is_open()) {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["gates"] = gates_.active_names();
    gates_out_ << j.dump() << "\n";
  }

  // Skills run on this tick's gates; their results feed the next controller step.
  const auto& pending = controller_.state().pending;
  const bool exiting = controller_.state().grasp_exiting;

  const WallAvoiderOutput avoid =
      wall_avoider_step(avoid_state_, grid, gates_.wall_avoid, params_.wall_avoider, t);
  const TagApproachStatus approach =
      tag_approach_step(approach_state_, nearest, gates_.tag_approach,
                        params_.tag_approach, t);

  SkillOutput pre;
  if (pending && here != nullptr) {
    pre = pre_enter_step(pre_state_, here->pose.yaw, pending->action.direction,
                         state_.robot, gates_.pre_enter, params_.pre_enter, t);
  } else {
    pre = pre_enter_step(pre_state_, 0.0, Direction::Straight, state_.robot,
                         false, params_.pre_enter, t);
  }

  SkillOutput enter;
  if (target_store_ && gates_.enter_store) {
    const StoreSpec& store = config_.stores[*target_store_];
    enter = enter_store_step(enter_state_, store.entrance, store.interior,
                             state_.robot, grid, true, params_.enter_store, t);
  } else {
    enter = enter_store_step(enter_state_, Pose2D{}, Rect{0, 0, 1, 1}, state_.robot,
                             grid, false, params_.enter_store, t);
    if (gates_.enter_store) enter.result = SkillResult::Failure;  // no such store
  }

  GraspLoopOutput grasp_out;
  PostGraspOutput post_out;
  if (gates_.grasp && target_store_) {
    grasp_out = grasp_loop_step(grasp_state_, state_.store_stock[*target_store_],
                                remaining(order_, state_.carried), !exiting,
                                params_.grasp, t);
    if (grasp_out.request) {
      const GraspResult res =
          attempt_grasp(state_, config_, *target_store_, *grasp_out.request);
      log_history({t, "grasp",
                   pending ? std::optional<std::string>(pending->junction_id)
                           : std::nullopt,
                   std::nullopt, config_.stores[*target_store_].category,
                   *grasp_out.request + (res.success ? " (success)" : " (" + res.reason + ")")});
    }
    post_out = post_grasp_step(
        post_state_, controller_.state().dir_prev.value_or(Direction::Straight),
        exiting, params_.post_grasp, t);
  } else {
    grasp_out = grasp_loop_step(grasp_state_, {}, OrderList{}, false, params_.grasp, t);
    post_out = post_grasp_step(post_state_, Direction::Straight, false,
                               params_.post_grasp, t);
  }

  const auto pickup_cmd =
      pickup_step(pickup_state_, config_.pickup_zone, state_.robot, gates_.pickup,
                  params_.pickup);

  SkillCommands cmds;
  cmds.wall_avoid = avoid.cmd;
  cmds.tag_approach = approach.cmd;
  cmds.pre_enter = pre.cmd;
  cmds.enter_store = enter.cmd;
  cmds.grasp = exiting ? post_out.cmd : std::nullopt;
  cmds.pickup = pickup_cmd;
  const VelocityCmd cmd = arbitrate(gates_, cmds);

  if (trajectory_out_.is_open()) {
    char line[128];
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f\n", t, state_.robot.x,
                  state_.robot.y, state_.robot.yaw);
    trajectory_out_ << line;
  }

  step(state_, config_, cmd, params_.dt);
  min_clearance_ =
      std::min(min_clearance_, wall_clearance(config_, state_.robot.x, state_.robot.y));

  feedback_ = ControllerInputs{};
  feedback_.approach_success = approach.success;
  feedback_.approach_timed_out = approach.timed_out;
  feedback_.pre_enter = pre.result;
  feedback_.enter_store = enter.result;
  feedback_.grasp_done = grasp_out.s_g;
  feedback_.post_grasp_done = post_out.done;

  ++ticks_;

  const bool done_shopping = remaining(order_, state_.carried).total() == 0;
  if (stage() == Stage::Pickup && done_shopping &&
      config_.pickup_zone.contains(state_.robot.x, state_.robot.y)) {
    outcome_ = EpisodeOutcome::Success;
    return false;
  }
  if (ticks_ >= params_.max_ticks) {
    outcome_ = EpisodeOutcome::TickLimit;
    return false;
  }
  return true;
}

void EpisodeRunner::finalize_artifacts() {
  if (params_.out_dir.empty()) return;
  std::ofstream map_out(params_.out_dir / "semantic_map.json");
  map_out << save_map(map_);
}

int EpisodeRunner::run() {
  while (tick()) {
  }
  finalize_artifacts();
  return outcome_ == EpisodeOutcome::Success ? 0 : 2;
}

int run_episode_from_files(const std::string& world_path, const OrderList& order,
                           const EpisodeParams& params, LlmTransport* llm) {
  WorldConfig config = load_world_file(world_path);
  EpisodeRunner runner(std::move(config), order, params, llm);
  return runner.run();
}

}  // namespace shopsim
