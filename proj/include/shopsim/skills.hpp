#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shopsim/action.hpp"
#include "shopsim/costmap.hpp"
#include "shopsim/geometry.hpp"
#include "shopsim/order.hpp"
#include "shopsim/world.hpp"

namespace shopsim {

// Every skill is a step function driven once per tick with its gate bit.
// With the gate low a skill publishes at most one stop command (on the
// falling edge) and then stays silent until the next rising edge.

enum class SkillResult { Running, Success, Failure };

// --- wall avoidance --------------------------------------------------------

enum class AvoidMode { Forward, Turn90, Turn180 };

const char* avoid_mode_name(AvoidMode m);

struct WallAvoiderParams {
  double d_safe = 0.5;
  double v_f = 0.2;
  double omega = 0.5;
  double theta_90 = kPi / 2.0;
  double theta_180 = kPi;
  CorridorSlice slice;
};

struct WallAvoiderState {
  AvoidMode mode = AvoidMode::Forward;
  double turn_start = 0.0;
  int turn_sign = +1;
  bool gate_prev = false;
  bool stop_sent = false;
};

struct WallAvoiderOutput {
  std::optional<VelocityCmd> cmd;
  const char* label = "Forward";
};

WallAvoiderOutput wall_avoider_step(WallAvoiderState& s, const OccupancyGrid& grid,
                                    bool gate, const WallAvoiderParams& p, double now);

// --- fiducial tag approach -------------------------------------------------

struct TagApproachParams {
  double x_star = 0.0;
  double d_star = 0.5;
  double tau_x = 0.03;
  double tau_z = 0.03;
  double tau_psi = 0.05;
  double k_x = 0.8;
  double k_z = 0.8;
  double k_psi = 1.2;
  double vx_max = 0.25;
  double vy_max = 0.25;
  double omega_max = 0.8;
  double timeout = 2.0;
  double d_adv = 0.3;
  double v_adv = 0.1;
};

struct TagApproachState {
  bool active = false;
  bool adv_done = false;
  std::optional<TagDetection> last_det;
  double t_det = -std::numeric_limits<double>::infinity();
  std::optional<double> advancing_until;
  bool gate_prev = false;
};

struct TagApproachStatus {
  std::optional<VelocityCmd> cmd;
  std::optional<int> success;  // publishes 0 while unconverged, 1 exactly once
  bool timed_out = false;
  const char* phase = "idle";
};

TagApproachStatus tag_approach_step(TagApproachState& s,
                                    const std::optional<TagDetection>& det,
                                    bool gate, const TagApproachParams& p, double now);

// --- pre-enter (face the chosen branch) ------------------------------------

struct PreEnterParams {
  double k_psi = 2.0;
  double omega_max = 0.8;
  double tau_psi = 0.05;
  double settle_tol = 0.008;  // internal convergence, well inside tau_psi
  double timeout = 10.0;
};

struct PreEnterState {
  bool active = false;
  bool gate_prev = false;
  bool stop_sent = false;
  double started = 0.0;
  double target_yaw = 0.0;
};

struct SkillOutput {
  std::optional<VelocityCmd> cmd;
  SkillResult result = SkillResult::Running;
};

SkillOutput pre_enter_step(PreEnterState& s, double junction_yaw, Direction dir,
                           const Pose2D& robot, bool gate, const PreEnterParams& p,
                           double now);

// --- enter store ------------------------------------------------------------

struct EnterStoreParams {
  double v = 0.2;
  double k_lat = 0.8;
  double k_psi = 2.0;
  double vy_max = 0.25;
  double omega_max = 0.8;
  double d_stop = 0.25;
  double timeout = 20.0;
  CorridorSlice slice;
};

struct EnterStoreState {
  bool active = false;
  bool gate_prev = false;
  bool stop_sent = false;
  double started = 0.0;
};

SkillOutput enter_store_step(EnterStoreState& s, const Pose2D& entrance,
                             const Rect& interior, const Pose2D& robot,
                             const OccupancyGrid& grid, bool gate,
                             const EnterStoreParams& p, double now);

// --- grasp loop --------------------------------------------------------------

struct GraspLoopParams {
  double t_grasp = 3.0;
};

struct GraspLoopState {
  bool active = false;
  bool gate_prev = false;
  double started = 0.0;
  std::vector<std::string> queue;  // one entry per planned grasp
  std::size_t issued = 0;
  bool done = false;
};

struct GraspLoopOutput {
  std::optional<std::string> request;  // item to grasp this tick, if any
  bool s_g = false;                    // set once the plan is exhausted
};

GraspLoopOutput grasp_loop_step(GraspLoopState& s,
                                const std::map<std::string, int>& stock,
                                const OrderList& remaining_order, bool gate,
                                const GraspLoopParams& p, double now);

// --- post-grasp exit maneuver -------------------------------------------------

struct PostGraspParams {
  double omega = 0.5;
  double v_backup = 0.2;
  double t_backup = 3.0;
};

struct PostGraspState {
  bool active = false;
  bool gate_prev = false;
  bool stop_sent = false;
  double started = 0.0;
  int turn_sign = +1;
  bool done = false;
};

struct PostGraspOutput {
  std::optional<VelocityCmd> cmd;
  bool done = false;
};

// pi turn with the sign opposite the entry turn (Left -> clockwise,
// Right -> counter-clockwise, Straight -> counter-clockwise), then a timed
// drive out of the store.
PostGraspOutput post_grasp_step(PostGraspState& s, Direction prev_dir, bool gate,
                                const PostGraspParams& p, double now);

// --- pickup (terminal) ---------------------------------------------------------

struct PickupParams {
  double v = 0.2;
  double k_psi = 2.0;
  double omega_max = 0.8;
  double bearing_gate = 0.3;
};

struct PickupState {
  bool gate_prev = false;
  bool stop_sent = false;
};

// Drives into the zone, then holds position forever. Never reports success.
std::optional<VelocityCmd> pickup_step(PickupState& s, const Rect& zone,
                                       const Pose2D& robot, bool gate,
                                       const PickupParams& p);

}  // namespace shopsim
