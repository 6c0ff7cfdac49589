#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shopsim/costmap.hpp"
#include "shopsim/orchestrator.hpp"
#include "shopsim/policy.hpp"
#include "shopsim/semantic_map.hpp"
#include "shopsim/skills.hpp"
#include "shopsim/world.hpp"

namespace shopsim {

enum class EpisodeOutcome { Running, Success, TickLimit };

struct EpisodeParams {
  double dt = 0.05;
  long max_ticks = 200000;
  std::string policy = "oracle";  // "oracle" or "llm"
  std::uint64_t seed = 0;         // overrides the world file seed
  int llm_retries = 2;
  std::filesystem::path out_dir;  // empty: no artifacts written

  CostmapParams costmap;
  CorridorSlice slice;
  WallAvoiderParams wall_avoider;
  TagApproachParams tag_approach;
  PreEnterParams pre_enter;
  EnterStoreParams enter_store;
  GraspLoopParams grasp;
  PostGraspParams post_grasp;
  PickupParams pickup;
  OrchestratorParams orchestrator;
};

// Drives the full sense -> costmap -> orchestrate -> skills -> arbitrate ->
// step loop over one world until the mission completes or ticks run out.
class EpisodeRunner {
 public:
  EpisodeRunner(WorldConfig config, OrderList order, EpisodeParams params,
                LlmTransport* llm = nullptr);
  ~EpisodeRunner();

  // One loop iteration. Returns false once the episode is over.
  bool tick();

  // Runs to completion and finalizes artifacts. 0 success, 2 tick limit.
  int run();

  EpisodeOutcome outcome() const { return outcome_; }
  const WorldState& world() const { return state_; }
  const WorldConfig& config() const { return config_; }
  WorldConfig& mutable_config() { return config_; }  // test hook (e.g. dropout)
  const MainController& controller() const { return controller_; }
  Stage stage() const { return controller_.state().stage; }
  const SemanticMap& map() const { return map_; }
  const std::vector<HistoryEvent>& history() const { return history_; }
  const GateSet& gates() const { return gates_; }
  double now() const { return state_.t; }
  long ticks() const { return ticks_; }
  double min_clearance() const { return min_clearance_; }
  const WallAvoiderState& avoider_state() const { return avoid_state_; }

  void finalize_artifacts();

 private:
  void request_decision();
  void handle_events(const std::vector<TransitionEvent>& events);
  void log_history(HistoryEvent event);
  std::size_t resolve_store(const std::string& category) const;

  WorldConfig config_;
  OrderList order_;
  EpisodeParams params_;
  LlmTransport* llm_;

  WorldState state_;
  MainController controller_;
  SemanticMap map_;
  std::vector<HistoryEvent> history_;
  StoreCapabilities caps_ = StoreCapabilities::defaults();

  WallAvoiderState avoid_state_;
  TagApproachState approach_state_;
  PreEnterState pre_state_;
  EnterStoreState enter_state_;
  GraspLoopState grasp_state_;
  PostGraspState post_state_;
  PickupState pickup_state_;

  // Previous-tick skill results feeding the next controller step.
  ControllerInputs feedback_;
  GateSet gates_;

  std::string current_junction_id_;
  std::optional<std::size_t> target_store_;

  EpisodeOutcome outcome_ = EpisodeOutcome::Running;
  long ticks_ = 0;
  double min_clearance_ = std::numeric_limits<double>::infinity();

  std::ofstream history_out_;
  std::ofstream decisions_out_;
  std::ofstream transitions_out_;
  std::ofstream gates_out_;
  std::ofstream trajectory_out_;
};

// Convenience wrapper used by the CLI: loads the world, runs one episode,
// writes artifacts. Returns the process exit code (0 success, 2 tick limit).
int run_episode_from_files(const std::string& world_path, const OrderList& order,
                           const EpisodeParams& params, LlmTransport* llm = nullptr);

}  // namespace shopsim
