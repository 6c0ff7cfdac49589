#pragma once

#include <array>
#include <map>
#include <string>

#include "shopsim/errors.hpp"

namespace shopsim {

class LlmTransport;

// Canonical item keys, in the order used everywhere (files, grasp plans).
inline constexpr std::array<const char*, 4> kItemKeys = {
    "hamburger", "iced_coffee", "hot_coffee", "medicine"};

// Four-count shopping request.
struct OrderList {
  int hamburger = 0;
  int iced_coffee = 0;
  int hot_coffee = 0;
  int medicine = 0;

  int total() const { return hamburger + iced_coffee + hot_coffee + medicine; }
  int get(const std::string& item) const;
  void set(const std::string& item, int count);
  void add(const std::string& item, int count);

  bool operator==(const OrderList&) const = default;
};

// Deterministic keyword parser. Case-insensitive, understands digits, the
// number words one..ten and "a"/"an", and a small synonym table. Throws
// EmptyOrder when nothing matched.
OrderList parse_order_rules(const std::string& text);

// LLM-backed parser constrained to a four-field JSON object; falls back to
// parse_order_rules after `retries` failed attempts or on transport trouble.
OrderList parse_order_llm(LlmTransport& transport, const std::string& text,
                          int retries);

// order.json round trip.
std::string save_order(const OrderList& order);
OrderList load_order(const std::string& bytes);  // throws ParseError

// Per-item max(order - carried, 0).
OrderList remaining(const OrderList& order, const std::map<std::string, int>& carried);

}  // namespace shopsim
