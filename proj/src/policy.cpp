#include "shopsim/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace shopsim {

StoreCapabilities StoreCapabilities::defaults() {
  StoreCapabilities caps;
  caps.supply[kPoiHamburgerStore] = {"hamburger"};
  caps.supply[kPoiCafe] = {"iced_coffee", "hot_coffee"};
  caps.supply[kPoiPharmacy] = {"medicine"};
  caps.supply[kPoiConvenienceStore] = {"hamburger", "iced_coffee", "hot_coffee",
                                       "medicine"};
  return caps;
}

bool StoreCapabilities::supplies(const std::string& category,
                                 const std::string& item) const {
  auto it = supply.find(category);
  return it != supply.end() && it->second.count(item) > 0;
}

bool StoreCapabilities::supplies_any(const std::string& category,
                                     const OrderList& remaining_order) const {
  for (const char* item : kItemKeys) {
    if (remaining_order.get(item) > 0 && supplies(category, item)) return true;
  }
  return false;
}

int StoreCapabilities::rank(const std::string& category) const {
  return category == kPoiConvenienceStore ? 1 : 0;
}

namespace {

// Direction at `junction` whose branch heading points most toward `target`,
// restricted to `candidates`. Ties resolve to the lowest direction code.
Direction toward(const JunctionRecord& junction, const Pose2D& target,
                 const std::vector<Direction>& candidates) {
  const double vx = target.x - junction.pose.x;
  const double vy = target.y - junction.pose.y;
  Direction best = candidates.front();
  double best_dot = -std::numeric_limits<double>::infinity();
  for (Direction d : candidates) {
    const double h = junction.pose.yaw + heading_offset(d);
    const double dot = std::cos(h) * vx + std::sin(h) * vy;
    if (dot > best_dot + 1e-12) {
      best_dot = dot;
      best = d;
    }
  }
  return best;
}

}  // namespace

Action decide_oracle(const DecisionContext& ctx, const StoreCapabilities& caps) {
  const JunctionRecord& here = ctx.junction;
  const std::vector<Direction> dirs = here.directions();
  if (dirs.empty()) {
    throw NoFeasibleDirection("junction " + here.id + " lists no directions");
  }
  auto untried = [&](Direction d) {
    return ctx.tried.count({here.id, d}) == 0;
  };

  if (ctx.remaining.total() == 0) {
    // Done shopping: head for the pickup point.
    for (Direction d : dirs) {
      if (here.poi_for(d) == std::string(kPoiPickupPoint)) {
        return {d, StoreAction::NoEntry};
      }
    }
    const JunctionRecord* target = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const JunctionRecord& rec : ctx.map) {
      bool has_pickup = false;
      for (const auto& pair : rec.poi_pairs) {
        if (parse_poi_pair(pair).second == kPoiPickupPoint) has_pickup = true;
      }
      if (!has_pickup || rec.id == here.id) continue;
      const double d = std::hypot(rec.pose.x - here.pose.x, rec.pose.y - here.pose.y);
      if (d < best_dist - 1e-12) {
        best_dist = d;
        target = &rec;
      }
    }
    if (target) {
      return {toward(here, target->pose, dirs), StoreAction::NoEntry};
    }
    for (Direction d : dirs) {
      if (untried(d)) return {d, StoreAction::NoEntry};
    }
    return {dirs.front(), StoreAction::NoEntry};
  }

  // Shopping ongoing: best unvisited instance whose category helps.
  struct Candidate {
    int rank;
    std::size_t junction_index;
    Direction direction;
    std::string junction_id;
    std::string poi;
  };
  std::optional<Candidate> best;
  for (std::size_t ji = 0; ji < ctx.map.size(); ++ji) {
    const JunctionRecord& rec = ctx.map[ji];
    for (const auto& pair : rec.poi_pairs) {
      auto [dir, poi] = parse_poi_pair(pair);
      if (!is_store_poi(poi)) continue;
      if (!caps.supplies_any(poi, ctx.remaining)) continue;
      if (ctx.visited.count({rec.id, dir, poi}) > 0) continue;
      Candidate c{caps.rank(poi), ji, dir, rec.id, poi};
      const auto key = [](const Candidate& x) {
        return std::make_tuple(x.rank, x.junction_index, static_cast<int>(x.direction));
      };
      if (!best || key(c) < key(*best)) best = c;
    }
  }

  if (best && best->junction_id == here.id) {
    return {best->direction, store_action_for_poi(best->poi)};
  }

  // Movement choice: avoid pickup-labeled branches while shopping remains,
  // as long as any alternative direction exists.
  std::vector<Direction> movable;
  for (Direction d : dirs) {
    if (here.poi_for(d) != std::string(kPoiPickupPoint)) movable.push_back(d);
  }
  if (movable.empty()) movable = dirs;

  if (best) {
    const JunctionRecord* target = ctx.map.find(best->junction_id);
    if (target) {
      return {toward(here, target->pose, movable), StoreAction::NoEntry};
    }
  }
  for (Direction d : movable) {
    if (untried(d)) return {d, StoreAction::NoEntry};
  }
  return {movable.front(), StoreAction::NoEntry};
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json DecisionContext::to_json() const {
  nlohmann::ordered_json j;
  j["map"] = map.to_json();
  j["junction_id"] = junction.id;
  j["remaining"] = {{"hamburger", remaining.hamburger},
                    {"iced_coffee", remaining.iced_coffee},
                    {"hot_coffee", remaining.hot_coffee},
                    {"medicine", remaining.medicine}};
  j["visited"] = nlohmann::ordered_json::array();
  for (const auto& [jid, dir, poi] : visited) {
    j["visited"].push_back({jid, direction_name(dir), poi});
  }
  j["tried"] = nlohmann::ordered_json::array();
  for (const auto& [jid, dir] : tried) {
    j["tried"].push_back({jid, direction_name(dir)});
  }
  j["history"] = history_lines;
  return j;
}

DecisionContext DecisionContext::from_json(const nlohmann::json& j) {
  DecisionContext ctx;
  if (!j.contains("map") || !j.contains("junction_id")) {
    throw ParseError("decision context: missing map/junction_id");
  }
  ctx.map = SemanticMap::from_json(j.at("map"));
  const std::string jid = j.at("junction_id").get<std::string>();
  const JunctionRecord* rec = ctx.map.find(jid);
  if (rec == nullptr) {
    throw ParseError("decision context: junction '" + jid + "' not in map");
  }
  ctx.junction = *rec;
  const auto& rem = j.at("remaining");
  for (const char* item : kItemKeys) {
    if (!rem.contains(item)) throw ParseError("decision context: remaining missing item");
    ctx.remaining.set(item, rem.at(item).get<int>());
  }
  for (const auto& v : j.value("visited", nlohmann::json::array())) {
    ctx.visited.insert({v.at(0).get<std::string>(),
                        direction_from_name(v.at(1).get<std::string>()),
                        v.at(2).get<std::string>()});
  }
  for (const auto& t : j.value("tried", nlohmann::json::array())) {
    ctx.tried.insert({t.at(0).get<std::string>(),
                      direction_from_name(t.at(1).get<std::string>())});
  }
  for (const auto& h : j.value("history", nlohmann::json::array())) {
    ctx.history_lines.push_back(h.get<std::string>());
  }
  return ctx;
}

Prompt build_prompt(const DecisionContext& ctx, const StoreCapabilities& caps) {
  Prompt p;
  p.system =
      "You are the navigation decision module of an indoor shopping robot.\n"
      "At each junction reply with a single line of the form "
      "<DIRECTION>|||<STORE_ACTION> and nothing else.\n"
      "\n"
      "Direction codes: 1=Left, 2=Straight, 3=Right.\n"
      "Store action codes: 1=hamburger store, 2=cafe, 3=pharmacy, "
      "4=convenience store, 5=no entry (keep moving, or head for pickup).\n"
      "\n"
      "Decision rules, in priority order:\n"
      "1. If every remaining count is zero, head for the pickup point: when "
      "the current junction lists a pickup point direction take it, otherwise "
      "move toward the junction nearest a known pickup point. Use store "
      "action 5.\n"
      "2. Otherwise select the best unvisited store instance (junction, "
      "direction, POI) whose category supplies a remaining item. Prefer "
      "specialized stores over convenience stores; on ties prefer the "
      "earliest-discovered junction.\n"
      "3. If that instance is at the current junction, enter it now: its "
      "direction with its store code.\n"
      "4. Otherwise move toward it, or take an untried branch when no useful "
      "store is known yet. Use store action 5.\n"
      "5. While items remain, never pick a pickup point direction if the "
      "junction lists any other direction.\n"
      "6. The direction you output must be listed at the current junction.\n";

  std::ostringstream u;
  u << "Store capabilities:\n";
  std::vector<std::string> cats;
  for (const auto& [cat, items] : caps.supply) cats.push_back(cat);
  std::sort(cats.begin(), cats.end());
  for (const auto& cat : cats) {
    u << "- " << cat << ":";
    bool first = true;
    for (const char* item : kItemKeys) {
      if (caps.supplies(cat, item)) {
        u << (first ? " " : ", ") << item;
        first = false;
      }
    }
    u << "\n";
  }
  u << "\nSemantic map:\n";
  if (ctx.map.empty()) u << "(none)\n";
  for (const auto& rec : ctx.map) {
    char pose[96];
    std::snprintf(pose, sizeof(pose), "(x=%.2f, y=%.2f, yaw=%.2f)", rec.pose.x,
                  rec.pose.y, rec.pose.yaw);
    u << "- " << rec.id << " at " << pose << ": ";
    for (std::size_t i = 0; i < rec.poi_pairs.size(); ++i) {
      if (i) u << " | ";
      u << rec.poi_pairs[i];
    }
    u << "\n";
  }
  u << "\nCurrent junction: " << ctx.junction.id << "\n";
  u << "Remaining order: hamburger=" << ctx.remaining.hamburger
    << ", iced_coffee=" << ctx.remaining.iced_coffee
    << ", hot_coffee=" << ctx.remaining.hot_coffee
    << ", medicine=" << ctx.remaining.medicine << "\n";
  u << "Visited store instances:";
  if (ctx.visited.empty()) {
    u << " (none)\n";
  } else {
    u << "\n";
    for (const auto& [jid, dir, poi] : ctx.visited) {
      u << "- (" << jid << ", " << direction_name(dir) << ", " << poi << ")\n";
    }
  }
  u << "Tried branches:";
  if (ctx.tried.empty()) {
    u << " (none)\n";
  } else {
    u << "\n";
    for (const auto& [jid, dir] : ctx.tried) {
      u << "- (" << jid << ", " << direction_name(dir) << ")\n";
    }
  }
  if (ctx.history_lines.empty()) {
    u << "history: (none)\n";
  } else {
    u << "history:\n";
    for (const auto& line : ctx.history_lines) u << "- " << line << "\n";
  }
  u << "\nReply with exactly <DIRECTION>|||<STORE_ACTION>.";
  p.user = u.str();
  return p;
}

Action parse_action(const std::string& text, const JunctionRecord& junction) {
  for (std::size_t i = 0; i + 5 <= text.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(text[i])) && text[i + 1] == '|' &&
        text[i + 2] == '|' && text[i + 3] == '|' &&
        std::isdigit(static_cast<unsigned char>(text[i + 4]))) {
      const Action a = {direction_from_code(text[i] - '0'),
                        store_action_from_code(text[i + 4] - '0')};
      if (!junction.has_direction(a.direction)) {
        throw InvalidDirection("direction " +
                               std::string(direction_name(a.direction)) +
                               " does not exist at " + junction.id);
      }
      return a;
    }
  }
  throw FormatError("no <digit>|||<digit> action found in: '" + text + "'");
}

DecisionOutcome decide_llm(LlmTransport& transport, const DecisionContext& ctx,
                           const StoreCapabilities& caps, int retries) {
  const Prompt prompt = build_prompt(ctx, caps);
  DecisionOutcome out;
  std::string correction;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply;
    const std::string user = prompt.user + correction;
    try {
      reply = transport.complete(prompt.system, user);
      ++out.attempts;
    } catch (const TransportError& e) {
      out.exchanges.emplace_back(user, std::string("<transport error: ") + e.what() + ">");
      break;  // transport trouble: no point retrying, fall back
    }
    out.exchanges.emplace_back(user, reply);
    try {
      out.action = parse_action(reply, ctx.junction);
      return out;
    } catch (const FormatError&) {
    } catch (const InvalidDirection&) {
    }
    correction =
        "\n\nYour previous reply was not a valid action. Reply with exactly "
        "one line <DIRECTION>|||<STORE_ACTION>, e.g. 2|||5, and the direction "
        "must be listed at the current junction.";
  }
  out.action = decide_oracle(ctx, caps);
  out.fallback = true;
  return out;
}

}  // namespace shopsim
