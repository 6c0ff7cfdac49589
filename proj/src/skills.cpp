#include "shopsim/skills.hpp"

#include <algorithm>
#include <cmath>

namespace shopsim {

const char* avoid_mode_name(AvoidMode m) {
  switch (m) {
    case AvoidMode::Forward: return "Forward";
    case AvoidMode::Turn90: return "Turn90";
    case AvoidMode::Turn180: return "Turn180";
  }
  return "?";
}

WallAvoiderOutput wall_avoider_step(WallAvoiderState& s, const OccupancyGrid& grid,
                                    bool gate, const WallAvoiderParams& p, double now) {
  WallAvoiderOutput out;
  if (!gate) {
    s.mode = AvoidMode::Forward;
    if (s.gate_prev || !s.stop_sent) {
      out.cmd = VelocityCmd::stop();
      s.stop_sent = true;
    }
    s.gate_prev = false;
    out.label = avoid_mode_name(s.mode);
    return out;
  }
  if (!s.gate_prev) {
    s.mode = AvoidMode::Forward;
    s.stop_sent = false;
  }
  s.gate_prev = true;

  switch (s.mode) {
    case AvoidMode::Forward: {
      const auto d = dist_ahead(grid, p.slice);
      if (d && *d <= p.d_safe) {
        s.mode = AvoidMode::Turn90;
        s.turn_start = now;
        s.turn_sign = free_side_bias(grid, p.slice) == Side::Left ? +1 : -1;
        out.cmd = VelocityCmd::stop();
      } else {
        out.cmd = VelocityCmd{p.v_f, 0.0, 0.0};
      }
      break;
    }
    case AvoidMode::Turn90: {
      if (now - s.turn_start < p.theta_90 / std::abs(p.omega)) {
        out.cmd = VelocityCmd{0.0, 0.0, s.turn_sign * p.omega};
      } else {
        out.cmd = VelocityCmd::stop();
        if (dist_ahead(grid, p.slice)) {
          s.mode = AvoidMode::Turn180;
          s.turn_start = now;
        } else {
          s.mode = AvoidMode::Forward;
        }
      }
      break;
    }
    case AvoidMode::Turn180: {
      if (now - s.turn_start < p.theta_180 / std::abs(p.omega)) {
        out.cmd = VelocityCmd{0.0, 0.0, s.turn_sign * p.omega};
      } else {
        s.mode = AvoidMode::Forward;
        out.cmd = VelocityCmd{p.v_f, 0.0, 0.0};
      }
      break;
    }
  }
  out.label = avoid_mode_name(s.mode);
  return out;
}

TagApproachStatus tag_approach_step(TagApproachState& s,
                                    const std::optional<TagDetection>& det,
                                    bool gate, const TagApproachParams& p, double now) {
  TagApproachStatus out;
  if (gate && !s.gate_prev) {
    s.active = true;
    s.adv_done = false;
    s.advancing_until.reset();
  }
  if (!gate && s.gate_prev) {
    s.active = false;
    s.advancing_until.reset();
    out.cmd = VelocityCmd::stop();
    out.success = 0;
    out.phase = "gated_off";
  }
  s.gate_prev = gate;
  if (!s.active) return out;

  if (det) {
    s.last_det = det;
    s.t_det = now;
  }

  // A started advance runs open-loop to completion.
  if (s.advancing_until) {
    if (now < *s.advancing_until) {
      out.cmd = VelocityCmd{std::min(std::abs(p.v_adv), p.vx_max), 0.0, 0.0};
      out.phase = "advance";
    } else {
      s.advancing_until.reset();
      s.adv_done = true;
      out.cmd = VelocityCmd::stop();
      out.success = 1;
      out.phase = "done";
    }
    return out;
  }

  if (now - s.t_det > p.timeout) {
    out.cmd = VelocityCmd::stop();
    out.success = 0;
    out.timed_out = true;
    out.phase = "timeout";
    return out;
  }

  const TagDetection& d = *s.last_det;
  const double e_x = d.x - p.x_star;
  const double e_z = d.z - p.d_star;
  const double e_psi = d.psi;

  if (std::abs(e_x) > p.tau_x || std::abs(e_z) > p.tau_z) {
    out.cmd = VelocityCmd{clamp(p.k_z * e_z, p.vx_max),
                          clamp(-p.k_x * e_x, p.vy_max),
                          clamp(p.k_psi * e_psi, p.omega_max)};
    out.success = 0;
    out.phase = "translate";
  } else if (std::abs(e_psi) > p.tau_psi) {
    out.cmd = VelocityCmd{0.0, 0.0, clamp(p.k_psi * e_psi, p.omega_max)};
    out.success = 0;
    out.phase = "rotate";
  } else if (!s.adv_done) {
    const double v = std::min(std::abs(p.v_adv), p.vx_max);
    s.advancing_until = now + p.d_adv / v;
    out.cmd = VelocityCmd{v, 0.0, 0.0};
    out.phase = "advance";
  } else {
    out.cmd = VelocityCmd::stop();
    out.phase = "hold";
  }
  return out;
}

SkillOutput pre_enter_step(PreEnterState& s, double junction_yaw, Direction dir,
                           const Pose2D& robot, bool gate, const PreEnterParams& p,
                           double now) {
  SkillOutput out;
  if (!gate) {
    if (s.gate_prev || (s.active && !s.stop_sent)) {
      out.cmd = VelocityCmd::stop();
      s.stop_sent = true;
    }
    s.active = false;
    s.gate_prev = false;
    return out;
  }
  if (!s.gate_prev) {
    s.active = true;
    s.stop_sent = false;
    s.started = now;
    s.target_yaw = normalize_angle(junction_yaw + heading_offset(dir));
  }
  s.gate_prev = true;

  const double e = normalize_angle(s.target_yaw - robot.yaw);
  // Already on heading at activation counts as done right away; otherwise we
  // settle well inside tau_psi so downstream corridor runs start straight.
  const bool fresh = now == s.started;
  if ((fresh && std::abs(e) <= p.tau_psi) || std::abs(e) <= p.settle_tol) {
    out.cmd = VelocityCmd::stop();
    out.result = SkillResult::Success;
    return out;
  }
  if (now - s.started > p.timeout) {
    out.cmd = VelocityCmd::stop();
    out.result = SkillResult::Failure;
    return out;
  }
  out.cmd = VelocityCmd{0.0, 0.0, clamp(p.k_psi * e, p.omega_max)};
  return out;
}

SkillOutput enter_store_step(EnterStoreState& s, const Pose2D& entrance,
                             const Rect& interior, const Pose2D& robot,
                             const OccupancyGrid& grid, bool gate,
                             const EnterStoreParams& p, double now) {
  SkillOutput out;
  if (!gate) {
    if (s.gate_prev || (s.active && !s.stop_sent)) {
      out.cmd = VelocityCmd::stop();
      s.stop_sent = true;
    }
    s.active = false;
    s.gate_prev = false;
    return out;
  }
  if (!s.gate_prev) {
    s.active = true;
    s.stop_sent = false;
    s.started = now;
  }
  s.gate_prev = true;

  if (interior.contains(robot.x, robot.y)) {
    out.cmd = VelocityCmd::stop();
    out.result = SkillResult::Success;
    return out;
  }
  if (now - s.started > p.timeout) {
    out.cmd = VelocityCmd::stop();
    out.result = SkillResult::Failure;
    return out;
  }
  const auto ahead = dist_ahead(grid, p.slice);
  if (ahead && *ahead < p.d_stop) {
    out.cmd = VelocityCmd::stop();
    out.result = SkillResult::Failure;
    return out;
  }

  // Drive along the entrance axis, shedding lateral offset proportionally.
  const double ux = std::cos(entrance.yaw);
  const double uy = std::sin(entrance.yaw);
  const double rx = robot.x - entrance.x;
  const double ry = robot.y - entrance.y;
  const double lat_left = ux * ry - uy * rx;  // + when robot left of the axis
  const double e_yaw = normalize_angle(entrance.yaw - robot.yaw);
  out.cmd = VelocityCmd{p.v, clamp(-p.k_lat * lat_left, p.vy_max),
                        clamp(p.k_psi * e_yaw, p.omega_max)};
  return out;
}

GraspLoopOutput grasp_loop_step(GraspLoopState& s,
                                const std::map<std::string, int>& stock,
                                const OrderList& remaining_order, bool gate,
                                const GraspLoopParams& p, double now) {
  GraspLoopOutput out;
  if (!gate) {
    s.active = false;
    s.gate_prev = false;
    return out;
  }
  if (!s.gate_prev) {
    s.active = true;
    s.started = now;
    s.issued = 0;
    s.done = false;
    s.queue.clear();
    for (const char* item : kItemKeys) {
      auto it = stock.find(item);
      const int in_stock = it == stock.end() ? 0 : it->second;
      const int n = std::min(in_stock, remaining_order.get(item));
      for (int k = 0; k < n; ++k) s.queue.emplace_back(item);
    }
  }
  s.gate_prev = true;

  if (!s.done) {
    if (s.issued < s.queue.size() &&
        now - s.started >= static_cast<double>(s.issued + 1) * p.t_grasp) {
      out.request = s.queue[s.issued];
      ++s.issued;
    }
    if (s.issued == s.queue.size() &&
        now - s.started >= static_cast<double>(s.queue.size()) * p.t_grasp) {
      s.done = true;
    }
  }
  out.s_g = s.done;
  return out;
}

PostGraspOutput post_grasp_step(PostGraspState& s, Direction prev_dir, bool gate,
                                const PostGraspParams& p, double now) {
  PostGraspOutput out;
  if (!gate) {
    if (s.gate_prev || (s.active && !s.stop_sent)) {
      out.cmd = VelocityCmd::stop();
      s.stop_sent = true;
    }
    s.active = false;
    s.gate_prev = false;
    return out;
  }
  if (!s.gate_prev) {
    s.active = true;
    s.stop_sent = false;
    s.started = now;
    s.done = false;
    s.turn_sign = prev_dir == Direction::Left ? -1 : +1;
  }
  s.gate_prev = true;

  const double turn_T = kPi / std::abs(p.omega);
  const double el = now - s.started;
  if (el < turn_T) {
    out.cmd = VelocityCmd{0.0, 0.0, s.turn_sign * p.omega};
  } else if (el < turn_T + p.t_backup) {
    out.cmd = VelocityCmd{p.v_backup, 0.0, 0.0};
  } else {
    out.cmd = VelocityCmd::stop();
    s.done = true;
  }
  out.done = s.done;
  return out;
}

std::optional<VelocityCmd> pickup_step(PickupState& s, const Rect& zone,
                                       const Pose2D& robot, bool gate,
                                       const PickupParams& p) {
  if (!gate) {
    if (s.gate_prev || !s.stop_sent) {
      s.stop_sent = true;
      s.gate_prev = false;
      return VelocityCmd::stop();
    }
    s.gate_prev = false;
    return std::nullopt;
  }
  s.gate_prev = true;
  s.stop_sent = false;

  if (zone.contains(robot.x, robot.y)) {
    return VelocityCmd::stop();  // terminal hold
  }
  const double dx = zone.cx() - robot.x;
  const double dy = zone.cy() - robot.y;
  const double bearing = normalize_angle(std::atan2(dy, dx) - robot.yaw);
  if (std::abs(bearing) > p.bearing_gate) {
    return VelocityCmd{0.0, 0.0, clamp(p.k_psi * bearing, p.omega_max)};
  }
  return VelocityCmd{p.v, 0.0, clamp(p.k_psi * bearing, p.omega_max)};
}

}  // namespace shopsim
