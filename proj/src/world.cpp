#include "shopsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace shopsim {

double Rng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  // Box-Muller; u1 nudged away from zero so the log is finite.
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1 + 1e-300));
  return r * std::cos(2.0 * kPi * u2);
}

const JunctionSpec* WorldConfig::junction_by_tag(int tag_id) const {
  for (const auto& j : junctions) {
    if (j.tag_id == tag_id) return &j;
  }
  return nullptr;
}

bool WorldConfig::is_junction_tag(int tag_id) const {
  return junction_by_tag(tag_id) != nullptr;
}

namespace {

constexpr double kEps = 1e-9;

struct Interval {
  double lo, hi;
};

// Removes `cut` from each interval in `spans`.
void subtract_interval(std::vector<Interval>& spans, double lo, double hi) {
  if (hi <= lo) return;
  std::vector<Interval> out;
  for (const Interval& s : spans) {
    if (hi <= s.lo + kEps || lo >= s.hi - kEps) {
      out.push_back(s);
      continue;
    }
    if (lo > s.lo + kEps) out.push_back({s.lo, lo});
    if (hi < s.hi - kEps) out.push_back({hi, s.hi});
  }
  spans = std::move(out);
}

// Walls are the parts of rectangle edges whose far side is not covered by
// any other free rectangle.
std::vector<Segment> compute_walls(const std::vector<Rect>& rects) {
  std::vector<Segment> walls;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const Rect& r = rects[i];
    struct Edge {
      bool vertical;
      double at;       // the fixed coordinate of the edge line
      double lo, hi;   // extent along the edge
      double far;      // coordinate of a point just beyond the edge
    };
    const double d = 1e-7;
    const Edge edges[4] = {
        {true, r.xmin, r.ymin, r.ymax, r.xmin - d},   // west
        {true, r.xmax, r.ymin, r.ymax, r.xmax + d},   // east
        {false, r.ymin, r.xmin, r.xmax, r.ymin - d},  // south
        {false, r.ymax, r.xmin, r.xmax, r.ymax + d},  // north
    };
    for (const Edge& e : edges) {
      std::vector<Interval> spans = {{e.lo, e.hi}};
      for (std::size_t k = 0; k < rects.size() && !spans.empty(); ++k) {
        if (k == i) continue;
        const Rect& o = rects[k];
        const bool covers_far = e.vertical
                                    ? (e.far >= o.xmin && e.far <= o.xmax)
                                    : (e.far >= o.ymin && e.far <= o.ymax);
        if (!covers_far) continue;
        if (e.vertical) {
          subtract_interval(spans, o.ymin, o.ymax);
        } else {
          subtract_interval(spans, o.xmin, o.xmax);
        }
      }
      for (const Interval& s : spans) {
        if (s.hi - s.lo < kEps) continue;
        if (e.vertical) {
          walls.push_back({e.at, s.lo, e.at, s.hi});
        } else {
          walls.push_back({s.lo, e.at, s.hi, e.at});
        }
      }
    }
  }
  return walls;
}

double dist_point_segment(double px, double py, const Segment& s) {
  const double vx = s.x2 - s.x1;
  const double vy = s.y2 - s.y1;
  const double wx = px - s.x1;
  const double wy = py - s.y1;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  const double dx = px - (s.x1 + t * vx);
  const double dy = py - (s.y1 + t * vy);
  return std::hypot(dx, dy);
}

// Ray (px,py)+t(dx,dy) against a segment; returns the smallest t >= 0.
std::optional<double> ray_segment(double px, double py, double dx, double dy,
                                  const Segment& s) {
  const double ex = s.x2 - s.x1;
  const double ey = s.y2 - s.y1;
  const double denom = dx * ey - dy * ex;
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double qx = s.x1 - px;
  const double qy = s.y1 - py;
  const double t = (qx * ey - qy * ex) / denom;
  const double u = (qx * dy - qy * dx) / denom;
  if (t < 0.0 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  return t;
}

// Earliest arc-length s in [0, L] at which a disc of radius `radius` moving
// from (ax,ay) along the unit direction (ux,uy) touches the segment.
// Distance-to-a-convex-set along a line is convex, so a ternary search
// followed by bisection is exact to solver precision.
std::optional<double> swept_contact(double ax, double ay, double ux, double uy,
                                    double L, double radius, const Segment& seg) {
  auto f = [&](double s) {
    return dist_point_segment(ax + s * ux, ay + s * uy, seg);
  };
  if (f(0.0) <= radius) return 0.0;
  double lo = 0.0, hi = L;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double s_min = 0.5 * (lo + hi);
  if (f(s_min) > radius) return std::nullopt;
  // Root of f(s) = radius on [0, s_min]; f crosses from above exactly once.
  double a = 0.0;
  double b = s_min;
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    if (f(m) > radius) {
      a = m;
    } else {
      b = m;
    }
  }
  return b;
}

bool segment_aabb_near(const Segment& s, double px, double py, double reach) {
  const double xmin = std::min(s.x1, s.x2) - reach;
  const double xmax = std::max(s.x1, s.x2) + reach;
  const double ymin = std::min(s.y1, s.y2) - reach;
  const double ymax = std::max(s.y1, s.y2) + reach;
  return px >= xmin && px <= xmax && py >= ymin && py <= ymax;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidConfig(msg);
}

}  // namespace

bool point_in_free_space(const WorldConfig& config, double px, double py) {
  for (const Rect& r : config.corridors) {
    if (r.contains(px, py)) return true;
  }
  return false;
}

double wall_clearance(const WorldConfig& config, double px, double py) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : config.walls) {
    best = std::min(best, dist_point_segment(px, py, s));
  }
  return best;
}

std::optional<double> raycast(const WorldConfig& config, double px, double py,
                              double dx, double dy, double max_range) {
  std::optional<double> best;
  for (const Segment& s : config.walls) {
    if (!segment_aabb_near(s, px, py, max_range)) continue;
    if (auto t = ray_segment(px, py, dx, dy, s)) {
      if (*t <= max_range && (!best || *t < *best)) best = *t;
    }
  }
  return best;
}

void validate_config(WorldConfig& config) {
  require(!config.corridors.empty(), "world has no free-space rectangles");
  for (const Rect& r : config.corridors) {
    require(r.valid(), "free-space rectangle has non-positive extent");
  }
  require(config.pickup_zone.valid(), "pickup zone rectangle is degenerate");
  require(config.collision_radius > 0.0, "collision_radius must be > 0");
  require(config.sensors.scan_rays >= 8, "scan_rays must be at least 8");
  require(config.sensors.scan_max_range > 0.0, "scan_max_range must be > 0");
  require(config.sensors.tag_max_range > 0.0, "tag_max_range must be > 0");
  require(config.sensors.tag_half_fov > 0.0, "tag_half_fov must be > 0");
  require(config.sensors.dropout_p >= 0.0 && config.sensors.dropout_p <= 1.0,
          "dropout_p must lie in [0, 1]");
  require(config.grasp_success_p >= 0.0 && config.grasp_success_p <= 1.0,
          "grasp_success_p must lie in [0, 1]");
  require(config.limits.vx_max > 0 && config.limits.vy_max > 0 &&
              config.limits.omega_max > 0,
          "kinematic limits must be > 0");

  std::set<int> tag_ids;
  for (const auto& j : config.junctions) {
    require(tag_ids.insert(j.tag_id).second,
            "duplicate tag_id " + std::to_string(j.tag_id));
  }
  for (const auto& st : config.stores) {
    if (st.tag_id) {
      require(tag_ids.insert(*st.tag_id).second,
              "duplicate tag_id " + std::to_string(*st.tag_id));
    }
    require(is_store_poi(st.category),
            "unknown store category '" + st.category + "'");
    require(st.interior.valid(), "store '" + st.category + "' interior is degenerate");
    for (const auto& [item, count] : st.stock) {
      require(count >= 0, "store '" + st.category + "' has negative stock for " + item);
    }
  }

  config.walls = compute_walls(config.corridors);

  require(point_in_free_space(config, config.robot_start.x, config.robot_start.y),
          "robot start pose lies outside free space");
  require(wall_clearance(config, config.robot_start.x, config.robot_start.y) >=
              config.collision_radius,
          "robot start pose violates the collision radius");

  // Every signboard direction must lead into traversable space.
  for (const auto& j : config.junctions) {
    std::set<int> dirs;
    for (const auto& e : j.signboard) {
      require(dirs.insert(static_cast<int>(e.direction)).second,
              "junction tag " + std::to_string(j.tag_id) +
                  " lists a direction twice");
      require(is_known_poi(e.poi), "unknown POI '" + e.poi + "'");
      const double h = normalize_angle(j.pose.yaw + heading_offset(e.direction));
      const double probe = 0.9;
      const double px = j.pose.x + probe * std::cos(h);
      const double py = j.pose.y + probe * std::sin(h);
      require(point_in_free_space(config, px, py) &&
                  wall_clearance(config, px, py) >= config.collision_radius,
              "junction tag " + std::to_string(j.tag_id) + " direction " +
                  direction_name(e.direction) + " leads into a wall");
    }
  }
}

WorldState world_from_config(const WorldConfig& config) {
  WorldState state;
  state.robot = config.robot_start;
  state.robot.yaw = normalize_angle(state.robot.yaw);
  state.t = 0.0;
  state.rng = Rng(config.seed);
  state.store_stock.reserve(config.stores.size());
  for (const auto& st : config.stores) {
    state.store_stock.push_back(st.stock);
  }
  return state;
}

void step(WorldState& state, const WorldConfig& config, const VelocityCmd& cmd,
          double dt) {
  if (!(dt > 0.0) || dt > 0.1) {
    throw Error("step dt must lie in (0, 0.1]");
  }
  const double vx = clamp(cmd.vx, config.limits.vx_max);
  const double vy = clamp(cmd.vy, config.limits.vy_max);
  const double omega = clamp(cmd.omega, config.limits.omega_max);

  const double c = std::cos(state.robot.yaw);
  const double s = std::sin(state.robot.yaw);
  const double mx = (c * vx - s * vy) * dt;
  const double my = (s * vx + c * vy) * dt;
  const double L = std::hypot(mx, my);

  if (L > 0.0) {
    const double ux = mx / L;
    const double uy = my / L;
    double allowed = L;
    for (const Segment& seg : config.walls) {
      if (!segment_aabb_near(seg, state.robot.x, state.robot.y,
                             L + config.collision_radius + 1e-6)) {
        continue;
      }
      if (auto sc = swept_contact(state.robot.x, state.robot.y, ux, uy, L,
                                  config.collision_radius, seg)) {
        allowed = std::min(allowed, *sc);
      }
    }
    allowed = std::max(0.0, allowed - 1e-7);  // stay strictly clear of contact
    state.robot.x += allowed * ux;
    state.robot.y += allowed * uy;
  }
  state.robot.yaw = normalize_angle(state.robot.yaw + omega * dt);
  state.t += dt;
}

RangeScan sense_range(const WorldState& state, const WorldConfig& config) {
  RangeScan scan;
  scan.max_range = config.sensors.scan_max_range;
  const int n = config.sensors.scan_rays;
  scan.rays.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double bearing = -kPi + 2.0 * kPi * k / n;
    const double a = state.robot.yaw + bearing;
    const auto hit = raycast(config, state.robot.x, state.robot.y, std::cos(a),
                             std::sin(a), scan.max_range);
    scan.rays.push_back({bearing, hit ? *hit : scan.max_range});
  }
  return scan;
}

std::vector<TagDetection> detect_tags(WorldState& state, const WorldConfig& config) {
  std::vector<TagDetection> out;
  const double drop = state.rng.uniform01();
  if (drop < config.sensors.dropout_p) return out;

  auto consider = [&](int tag_id, const Pose2D& tag_pose) {
    TagGeometry g;
    try {
      g = relative_tag(state.robot, tag_pose);
    } catch (const NotInFront&) {
      return;
    }
    if (std::hypot(g.x, g.z) > config.sensors.tag_max_range) return;
    if (std::abs(std::atan2(g.x, g.z)) > config.sensors.tag_half_fov) return;
    if (std::abs(g.psi) >= kPi / 2.0) return;

    // Occlusion: line of sight must not cross a wall short of the tag.
    const double dx = tag_pose.x - state.robot.x;
    const double dy = tag_pose.y - state.robot.y;
    const double dist = std::hypot(dx, dy);
    if (dist > 1e-9) {
      const auto hit = raycast(config, state.robot.x, state.robot.y, dx / dist,
                               dy / dist, dist - 1e-6);
      if (hit) return;
    }

    TagDetection det;
    det.tag_id = tag_id;
    det.x = g.x + config.sensors.noise_std_x * state.rng.gaussian();
    det.z = std::max(g.z + config.sensors.noise_std_z * state.rng.gaussian(), 1e-6);
    det.psi = normalize_angle(g.psi + config.sensors.noise_std_psi * state.rng.gaussian());
    det.stamp = state.t;
    out.push_back(det);
  };

  for (const auto& j : config.junctions) consider(j.tag_id, j.tag_pose);
  for (const auto& st : config.stores) {
    if (st.tag_id) {
      // Store tags sit on the far interior wall, facing out of the doorway.
      consider(*st.tag_id, compose(st.entrance, Pose2D{0.0, 0.0, kPi}));
    }
  }
  return out;
}

GraspResult attempt_grasp(WorldState& state, const WorldConfig& config,
                          std::size_t store_index, const std::string& item) {
  if (store_index >= config.stores.size()) {
    throw Error("store index out of range");
  }
  const StoreSpec& store = config.stores[store_index];
  if (!store.interior.contains(state.robot.x, state.robot.y)) {
    throw NotInStore("robot is not inside '" + store.category + "'");
  }
  auto& stock = state.store_stock[store_index];
  auto it = stock.find(item);
  if (it == stock.end() || it->second <= 0) {
    return {false, "out of stock"};
  }
  const double u = state.rng.uniform01();
  if (u >= config.grasp_success_p) {
    return {false, "grasp failed"};
  }
  it->second -= 1;
  state.carried[item] += 1;
  return {true, "ok"};
}

// ---------------------------------------------------------------------------
// JSON schema

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) {
    throw InvalidConfig(std::string("world config: missing field '") + name + "'");
  }
  return j.at(name);
}

Pose2D pose_from_json(const nlohmann::json& j) {
  return {field(j, "x").get<double>(), field(j, "y").get<double>(),
          normalize_angle(field(j, "yaw").get<double>())};
}

nlohmann::ordered_json pose_to_json(const Pose2D& p) {
  return {{"x", p.x}, {"y", p.y}, {"yaw", p.yaw}};
}

Rect rect_from_json(const nlohmann::json& j) {
  const auto& mn = field(j, "min");
  const auto& mx = field(j, "max");
  if (!mn.is_array() || mn.size() != 2 || !mx.is_array() || mx.size() != 2) {
    throw InvalidConfig("world config: rect min/max must be [x, y] pairs");
  }
  return {mn[0].get<double>(), mn[1].get<double>(), mx[0].get<double>(),
          mx[1].get<double>()};
}

nlohmann::ordered_json rect_to_json(const Rect& r) {
  return {{"min", {r.xmin, r.ymin}}, {"max", {r.xmax, r.ymax}}};
}

}  // namespace

WorldConfig world_config_from_json(const nlohmann::json& j) {
  WorldConfig cfg;
  for (const auto& r : field(j, "corridors")) {
    cfg.corridors.push_back(rect_from_json(r));
  }
  for (const auto& jj : field(j, "junctions")) {
    JunctionSpec spec;
    spec.tag_id = field(jj, "tag_id").get<int>();
    spec.pose = pose_from_json(field(jj, "pose"));
    spec.tag_pose = pose_from_json(field(jj, "tag_pose"));
    for (const auto& e : field(jj, "signboard")) {
      SignboardEntry entry;
      try {
        entry.direction = direction_from_name(field(e, "direction").get<std::string>());
      } catch (const ParseError& err) {
        throw InvalidConfig(std::string("world config: ") + err.what());
      }
      entry.poi = field(e, "poi").get<std::string>();
      spec.signboard.push_back(entry);
    }
    cfg.junctions.push_back(std::move(spec));
  }
  for (const auto& js : field(j, "stores")) {
    StoreSpec st;
    st.category = field(js, "category").get<std::string>();
    st.entrance = pose_from_json(field(js, "entrance"));
    if (js.contains("tag_id") && !js.at("tag_id").is_null()) {
      st.tag_id = js.at("tag_id").get<int>();
    }
    st.interior = rect_from_json(field(js, "interior"));
    for (const auto& [item, count] : field(js, "stock").items()) {
      st.stock[item] = count.get<int>();
    }
    cfg.stores.push_back(std::move(st));
  }
  cfg.pickup_zone = rect_from_json(field(j, "pickup_zone"));
  cfg.robot_start = pose_from_json(field(j, "robot_start"));

  const auto& sens = field(j, "sensors");
  cfg.sensors.tag_max_range = field(sens, "tag_max_range").get<double>();
  cfg.sensors.tag_half_fov = field(sens, "tag_half_fov").get<double>();
  cfg.sensors.dropout_p = field(sens, "dropout_p").get<double>();
  const auto& noise = field(sens, "noise_std");
  cfg.sensors.noise_std_x = field(noise, "x").get<double>();
  cfg.sensors.noise_std_z = field(noise, "z").get<double>();
  cfg.sensors.noise_std_psi = field(noise, "psi").get<double>();
  cfg.sensors.scan_rays = field(sens, "scan_rays").get<int>();
  cfg.sensors.scan_max_range = field(sens, "scan_max_range").get<double>();

  const auto& lim = field(j, "limits");
  cfg.limits.vx_max = field(lim, "vx_max").get<double>();
  cfg.limits.vy_max = field(lim, "vy_max").get<double>();
  cfg.limits.omega_max = field(lim, "omega_max").get<double>();

  cfg.collision_radius = field(j, "collision_radius").get<double>();
  if (j.contains("grasp_success_p")) {
    cfg.grasp_success_p = j.at("grasp_success_p").get<double>();
  }
  cfg.seed = field(j, "seed").get<std::uint64_t>();

  validate_config(cfg);
  return cfg;
}

WorldConfig load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open world file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig("world file '" + path + "': " + e.what());
  }
  return world_config_from_json(j);
}

nlohmann::ordered_json world_config_to_json(const WorldConfig& cfg) {
  nlohmann::ordered_json j;
  j["corridors"] = nlohmann::ordered_json::array();
  for (const auto& r : cfg.corridors) j["corridors"].push_back(rect_to_json(r));
  j["junctions"] = nlohmann::ordered_json::array();
  for (const auto& jj : cfg.junctions) {
    nlohmann::ordered_json e;
    e["tag_id"] = jj.tag_id;
    e["pose"] = pose_to_json(jj.pose);
    e["tag_pose"] = pose_to_json(jj.tag_pose);
    e["signboard"] = nlohmann::ordered_json::array();
    for (const auto& sb : jj.signboard) {
      e["signboard"].push_back(
          {{"direction", direction_name(sb.direction)}, {"poi", sb.poi}});
    }
    j["junctions"].push_back(std::move(e));
  }
  j["stores"] = nlohmann::ordered_json::array();
  for (const auto& st : cfg.stores) {
    nlohmann::ordered_json e;
    e["category"] = st.category;
    e["entrance"] = pose_to_json(st.entrance);
    if (st.tag_id) {
      e["tag_id"] = *st.tag_id;
    } else {
      e["tag_id"] = nullptr;
    }
    e["interior"] = rect_to_json(st.interior);
    e["stock"] = nlohmann::ordered_json::object();
    for (const auto& [item, count] : st.stock) e["stock"][item] = count;
    j["stores"].push_back(std::move(e));
  }
  j["pickup_zone"] = rect_to_json(cfg.pickup_zone);
  j["robot_start"] = pose_to_json(cfg.robot_start);
  j["sensors"] = {{"tag_max_range", cfg.sensors.tag_max_range},
                  {"tag_half_fov", cfg.sensors.tag_half_fov},
                  {"dropout_p", cfg.sensors.dropout_p},
                  {"noise_std",
                   {{"x", cfg.sensors.noise_std_x},
                    {"z", cfg.sensors.noise_std_z},
                    {"psi", cfg.sensors.noise_std_psi}}},
                  {"scan_rays", cfg.sensors.scan_rays},
                  {"scan_max_range", cfg.sensors.scan_max_range}};
  j["limits"] = {{"vx_max", cfg.limits.vx_max},
                 {"vy_max", cfg.limits.vy_max},
                 {"omega_max", cfg.limits.omega_max}};
  j["collision_radius"] = cfg.collision_radius;
  j["grasp_success_p"] = cfg.grasp_success_p;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace shopsim
