#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shopsim/llm_transport.hpp"
#include "shopsim/order.hpp"
#include "shopsim/semantic_map.hpp"

namespace shopsim {

// Which items each store category can supply, and how categories rank when
// several could serve the same item (specialists first).
struct StoreCapabilities {
  std::map<std::string, std::set<std::string>> supply;

  static StoreCapabilities defaults();
  bool supplies(const std::string& category, const std::string& item) const;
  bool supplies_any(const std::string& category, const OrderList& remaining_order) const;
  int rank(const std::string& category) const;  // 0 specialist, 1 convenience
};

// Everything the decision layer sees at a junction.
struct DecisionContext {
  SemanticMap map;
  JunctionRecord junction;  // member of map
  OrderList remaining;
  std::set<StoreInstance> visited;
  std::set<Branch> tried;
  std::vector<std::string> history_lines;

  nlohmann::ordered_json to_json() const;
  static DecisionContext from_json(const nlohmann::json& j);  // ParseError
};

// Deterministic navigation rule; the direction it picks always exists at the
// current junction. Throws NoFeasibleDirection for a junction without
// directions.
Action decide_oracle(const DecisionContext& ctx, const StoreCapabilities& caps);

struct Prompt {
  std::string system;
  std::string user;
};

// Byte-stable prompt for the external decision endpoint.
Prompt build_prompt(const DecisionContext& ctx, const StoreCapabilities& caps);

// Lenient parse: first `<digit>|||<digit>` substring, range-checked, and the
// direction must exist at the junction. Throws FormatError / InvalidDirection.
Action parse_action(const std::string& text, const JunctionRecord& junction);

struct DecisionOutcome {
  Action action;
  int attempts = 0;     // transport calls actually made
  bool fallback = false;
  std::vector<std::pair<std::string, std::string>> exchanges;  // prompt/user, response
};

// Total decision function: queries the endpoint, retries with a correction
// line on malformed replies, and falls back to the oracle when retries are
// exhausted or the transport fails.
DecisionOutcome decide_llm(LlmTransport& transport, const DecisionContext& ctx,
                           const StoreCapabilities& caps, int retries);

}  // namespace shopsim
