#pragma once

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shopsim/action.hpp"
#include "shopsim/geometry.hpp"

namespace shopsim {

// One discovered junction: symbolic direction->POI pairs plus the robot pose
// at the moment the signboard was first observed.
struct JunctionRecord {
  std::string id;                       // "junction_<k>"
  std::vector<std::string> poi_pairs;   // "<Direction>: <poi name>"
  Pose2D pose;

  std::vector<Direction> directions() const;
  std::optional<std::string> poi_for(Direction d) const;
  bool has_direction(Direction d) const { return poi_for(d).has_value(); }

  bool operator==(const JunctionRecord&) const = default;
};

std::string make_poi_pair(Direction d, const std::string& poi);
std::pair<Direction, std::string> parse_poi_pair(const std::string& pair);  // ParseError

struct JunctionObservation {
  Pose2D pose;
  std::vector<std::string> poi_pairs;
  int tag_id = -1;
};

// Insertion-ordered, append-only list of junction records.
class SemanticMap {
 public:
  // Merges into an existing record when the pose is within merge_radius,
  // otherwise appends a new record. The first observed pose wins.
  const JunctionRecord& record(const JunctionObservation& obs, double merge_radius = 1.0);

  const JunctionRecord* find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;  // npos when absent
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }
  const JunctionRecord& operator[](std::size_t i) const { return records_[i]; }

  nlohmann::ordered_json to_json() const;
  static SemanticMap from_json(const nlohmann::json& j);  // ParseError

  bool operator==(const SemanticMap&) const = default;

 private:
  std::vector<JunctionRecord> records_;
};

std::string save_map(const SemanticMap& map);
SemanticMap load_map(const std::string& bytes);  // ParseError

// One line of the episode history. kind-specific fields are optional and
// populated per kind (turn => direction, store_entry => junction+dir+poi).
struct HistoryEvent {
  double t = 0.0;
  std::string kind;  // junction_visit | turn | store_entry | grasp | pickup | decision
  std::optional<std::string> junction_id;
  std::optional<Direction> direction;
  std::optional<std::string> poi;
  std::string detail;

  nlohmann::ordered_json to_json() const;
  static HistoryEvent from_json(const nlohmann::json& j);  // ParseError
  std::string to_line() const;  // human-readable rendering for prompts
};

using StoreInstance = std::tuple<std::string, Direction, std::string>;
using Branch = std::pair<std::string, Direction>;

// Store instances actually entered (one tuple per store_entry, deduplicated).
std::set<StoreInstance> visited_instances(const std::vector<HistoryEvent>& log);

// Branches committed to, from turn and store_entry events.
std::set<Branch> tried_branches(const std::vector<HistoryEvent>& log);

}  // namespace shopsim
