#include "shopsim/order.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

#include <json.hpp>

namespace shopsim {

int OrderList::get(const std::string& item) const {
  if (item == "hamburger") return hamburger;
  if (item == "iced_coffee") return iced_coffee;
  if (item == "hot_coffee") return hot_coffee;
  if (item == "medicine") return medicine;
  return 0;
}

void OrderList::set(const std::string& item, int count) {
  if (item == "hamburger") hamburger = count;
  else if (item == "iced_coffee") iced_coffee = count;
  else if (item == "hot_coffee") hot_coffee = count;
  else if (item == "medicine") medicine = count;
}

void OrderList::add(const std::string& item, int count) {
  set(item, get(item) + count);
}

namespace {

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::optional<int> number_value(const std::string& tok) {
  static const std::map<std::string, int> words = {
      {"a", 1},    {"an", 1},   {"one", 1}, {"two", 2},  {"three", 3},
      {"four", 4}, {"five", 5}, {"six", 6}, {"seven", 7}, {"eight", 8},
      {"nine", 9}, {"ten", 10}};
  auto it = words.find(tok);
  if (it != words.end()) return it->second;
  if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    if (tok.size() > 4) return 9999;
    return std::stoi(tok);
  }
  return std::nullopt;
}

std::string singular(const std::string& tok) {
  if (tok.size() > 3 && tok.back() == 's') return tok.substr(0, tok.size() - 1);
  return tok;
}

// Single-word synonyms. Bare "coffee" is handled separately so the two-word
// phrases get first pick.
std::optional<std::string> item_for_word(const std::string& word) {
  const std::string w = singular(word);
  if (w == "hamburger" || w == "burger") return "hamburger";
  if (w == "medicine" || w == "med" || w == "meds" || w == "drug") return "medicine";
  return std::nullopt;
}

}  // namespace

OrderList parse_order_rules(const std::string& text) {
  const std::vector<std::string> toks = tokenize_lower(text);
  OrderList order;
  std::optional<int> pending;

  auto take = [&](const std::string& item) {
    order.add(item, pending.value_or(1));
    pending.reset();
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (auto n = number_value(toks[i])) {
      pending = *n;
      continue;
    }
    const bool has_next = i + 1 < toks.size();
    if (has_next && singular(toks[i + 1]) == "coffee") {
      if (toks[i] == "iced" || toks[i] == "cold") {
        take("iced_coffee");
        ++i;
        continue;
      }
      if (toks[i] == "hot") {
        take("hot_coffee");
        ++i;
        continue;
      }
    }
    if (auto item = item_for_word(toks[i])) {
      take(*item);
      continue;
    }
    if (singular(toks[i]) == "coffee") {
      take("hot_coffee");  // unqualified coffee reads as hot
      continue;
    }
  }

  if (order.total() == 0) {
    throw EmptyOrder("no order items recognized in: '" + text + "'");
  }
  return order;
}

std::string save_order(const OrderList& order) {
  nlohmann::ordered_json j;
  j["hamburger"] = order.hamburger;
  j["iced_coffee"] = order.iced_coffee;
  j["hot_coffee"] = order.hot_coffee;
  j["medicine"] = order.medicine;
  return j.dump(2) + "\n";
}

OrderList load_order(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("order.json: ") + e.what());
  }
  OrderList order;
  for (const char* key : kItemKeys) {
    if (!j.contains(key)) {
      throw ParseError(std::string("order.json: missing field '") + key + "'");
    }
    if (!j[key].is_number_integer() || j[key].get<int>() < 0) {
      throw ParseError(std::string("order.json: field '") + key +
                       "' must be a non-negative integer");
    }
    order.set(key, j[key].get<int>());
  }
  return order;
}

OrderList remaining(const OrderList& order, const std::map<std::string, int>& carried) {
  OrderList out;
  for (const char* key : kItemKeys) {
    auto it = carried.find(key);
    const int have = it == carried.end() ? 0 : it->second;
    out.set(key, std::max(order.get(key) - have, 0));
  }
  return out;
}

}  // namespace shopsim
