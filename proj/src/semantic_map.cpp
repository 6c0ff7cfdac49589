#include "shopsim/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace shopsim {

std::string make_poi_pair(Direction d, const std::string& poi) {
  return std::string(direction_name(d)) + ": " + poi;
}

std::pair<Direction, std::string> parse_poi_pair(const std::string& pair) {
  const auto sep = pair.find(": ");
  if (sep == std::string::npos) {
    throw ParseError("malformed POI pair: '" + pair + "'");
  }
  const Direction d = direction_from_name(pair.substr(0, sep));
  std::string poi = pair.substr(sep + 2);
  if (!is_known_poi(poi)) {
    throw ParseError("unknown POI name: '" + poi + "'");
  }
  return {d, std::move(poi)};
}

std::vector<Direction> JunctionRecord::directions() const {
  std::vector<Direction> out;
  for (const auto& p : poi_pairs) out.push_back(parse_poi_pair(p).first);
  std::sort(out.begin(), out.end(),
            [](Direction a, Direction b) { return static_cast<int>(a) < static_cast<int>(b); });
  return out;
}

std::optional<std::string> JunctionRecord::poi_for(Direction d) const {
  for (const auto& p : poi_pairs) {
    auto [dir, poi] = parse_poi_pair(p);
    if (dir == d) return poi;
  }
  return std::nullopt;
}

const JunctionRecord& SemanticMap::record(const JunctionObservation& obs,
                                          double merge_radius) {
  for (auto& rec : records_) {
    const double d = std::hypot(rec.pose.x - obs.pose.x, rec.pose.y - obs.pose.y);
    if (d <= merge_radius) {
      // Re-observation: union the pairs, never duplicate, keep the first pose.
      for (const auto& pair : obs.poi_pairs) {
        parse_poi_pair(pair);  // validate
        if (std::find(rec.poi_pairs.begin(), rec.poi_pairs.end(), pair) ==
            rec.poi_pairs.end()) {
          rec.poi_pairs.push_back(pair);
        }
      }
      return rec;
    }
  }
  JunctionRecord rec;
  rec.id = "junction_" + std::to_string(records_.size() + 1);
  for (const auto& pair : obs.poi_pairs) {
    parse_poi_pair(pair);  // validate
    rec.poi_pairs.push_back(pair);
  }
  // Poses are stored at micrometer resolution; keeps serialized maps tidy.
  rec.pose.x = std::round(obs.pose.x * 1e6) / 1e6;
  rec.pose.y = std::round(obs.pose.y * 1e6) / 1e6;
  rec.pose.yaw = std::round(obs.pose.yaw * 1e6) / 1e6;
  records_.push_back(std::move(rec));
  return records_.back();
}

const JunctionRecord* SemanticMap::find(const std::string& id) const {
  for (const auto& rec : records_) {
    if (rec.id == id) return &rec;
  }
  return nullptr;
}

std::size_t SemanticMap::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id == id) return i;
  }
  return npos;
}

nlohmann::ordered_json SemanticMap::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rec : records_) {
    nlohmann::ordered_json e;
    e["id"] = rec.id;
    e["pois"] = rec.poi_pairs;
    e["pose"] = {{"x", rec.pose.x}, {"y", rec.pose.y}, {"yaw", rec.pose.yaw}};
    arr.push_back(std::move(e));
  }
  return arr;
}

SemanticMap SemanticMap::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("semantic map: expected a JSON array");
  SemanticMap map;
  std::set<std::string> ids;
  for (const auto& e : j) {
    JunctionRecord rec;
    if (!e.contains("id") || !e.contains("pois") || !e.contains("pose")) {
      throw ParseError("semantic map: record is missing id/pois/pose");
    }
    rec.id = e.at("id").get<std::string>();
    if (!ids.insert(rec.id).second) {
      throw ParseError("semantic map: duplicate id '" + rec.id + "'");
    }
    std::set<int> dirs;
    for (const auto& p : e.at("pois")) {
      const std::string pair = p.get<std::string>();
      auto [dir, poi] = parse_poi_pair(pair);
      (void)poi;
      if (!dirs.insert(static_cast<int>(dir)).second) {
        throw ParseError("semantic map: '" + rec.id + "' lists a direction twice");
      }
      rec.poi_pairs.push_back(pair);
    }
    const auto& pose = e.at("pose");
    rec.pose = {pose.at("x").get<double>(), pose.at("y").get<double>(),
                pose.at("yaw").get<double>()};
    map.records_.push_back(std::move(rec));
  }
  return map;
}

std::string save_map(const SemanticMap& map) { return map.to_json().dump(2) + "\n"; }

SemanticMap load_map(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("semantic map: ") + e.what());
  }
  return SemanticMap::from_json(j);
}

nlohmann::ordered_json HistoryEvent::to_json() const {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["kind"] = kind;
  if (junction_id) j["junction_id"] = *junction_id;
  if (direction) j["direction"] = direction_name(*direction);
  if (poi) j["poi"] = *poi;
  j["detail"] = detail;
  return j;
}

HistoryEvent HistoryEvent::from_json(const nlohmann::json& j) {
  HistoryEvent e;
  if (!j.contains("t") || !j.contains("kind")) {
    throw ParseError("history event: missing t/kind");
  }
  e.t = j.at("t").get<double>();
  e.kind = j.at("kind").get<std::string>();
  if (j.contains("junction_id")) e.junction_id = j.at("junction_id").get<std::string>();
  if (j.contains("direction")) {
    e.direction = direction_from_name(j.at("direction").get<std::string>());
  }
  if (j.contains("poi")) e.poi = j.at("poi").get<std::string>();
  if (j.contains("detail")) e.detail = j.at("detail").get<std::string>();
  if (e.kind == "turn" && !e.direction) {
    throw ParseError("history event: turn without direction");
  }
  if (e.kind == "store_entry" && (!e.junction_id || !e.direction || !e.poi)) {
    throw ParseError("history event: store_entry without junction/direction/poi");
  }
  return e;
}

std::string HistoryEvent::to_line() const {
  char head[64];
  std::snprintf(head, sizeof(head), "[t=%.1f] %s", t, kind.c_str());
  std::string line = head;
  if (junction_id) line += " at " + *junction_id;
  if (direction) line += std::string(": ") + direction_name(*direction);
  if (poi) line += " -> " + *poi;
  if (!detail.empty()) line += " (" + detail + ")";
  return line;
}

std::set<StoreInstance> visited_instances(const std::vector<HistoryEvent>& log) {
  std::set<StoreInstance> out;
  for (const auto& e : log) {
    if (e.kind == "store_entry" && e.junction_id && e.direction && e.poi) {
      out.insert({*e.junction_id, *e.direction, *e.poi});
    }
  }
  return out;
}

std::set<Branch> tried_branches(const std::vector<HistoryEvent>& log) {
  std::set<Branch> out;
  for (const auto& e : log) {
    if ((e.kind == "turn" || e.kind == "store_entry") && e.junction_id && e.direction) {
      out.insert({*e.junction_id, *e.direction});
    }
  }
  return out;
}

}  // namespace shopsim
