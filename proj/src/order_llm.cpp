#include <algorithm>

#include "shopsim/llm_transport.hpp"
#include "shopsim/order.hpp"

namespace shopsim {

namespace {

constexpr int kCountCap = 20;  // sanity cap per item

constexpr const char* kSystemPrompt =
    "You convert a shopping request into a JSON object with exactly these "
    "four integer fields and nothing else:\n"
    "{\"hamburger\": <n>, \"iced_coffee\": <n>, \"hot_coffee\": <n>, "
    "\"medicine\": <n>}\n"
    "Counts are non-negative integers. Items that were not requested are 0.";

OrderList order_from_reply(const std::string& reply) {
  const std::string block = extract_first_json_object(reply);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(block);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("order reply is not JSON: ") + e.what());
  }
  OrderList order;
  for (const char* key : kItemKeys) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw FormatError(std::string("order reply missing integer field '") + key + "'");
    }
    const int n = j[key].get<int>();
    if (n < 0) {
      throw FormatError(std::string("order reply has negative count for '") + key + "'");
    }
    order.set(key, std::min(n, kCountCap));
  }
  return order;
}

}  // namespace

OrderList parse_order_llm(LlmTransport& transport, const std::string& text,
                          int retries) {
  std::string correction;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply;
    try {
      reply = transport.complete(kSystemPrompt, text + correction);
    } catch (const TransportError&) {
      break;
    }
    try {
      return order_from_reply(reply);
    } catch (const FormatError&) {
      correction =
          "\n\nYour previous reply was not a valid order object. Reply with "
          "exactly the four-field JSON object and nothing else.";
    }
  }
  return parse_order_rules(text);
}

}  // namespace shopsim
