#include "shopsim/action.hpp"

#include <array>

namespace shopsim {

Direction direction_from_code(int code) {
  if (code < 1 || code > 3) {
    throw FormatError("direction code out of range: " + std::to_string(code));
  }
  return static_cast<Direction>(code);
}

StoreAction store_action_from_code(int code) {
  if (code < 1 || code > 5) {
    throw FormatError("store action code out of range: " + std::to_string(code));
  }
  return static_cast<StoreAction>(code);
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Left: return "Left";
    case Direction::Straight: return "Straight";
    case Direction::Right: return "Right";
  }
  return "?";
}

Direction direction_from_name(std::string_view name) {
  if (name == "Left") return Direction::Left;
  if (name == "Straight") return Direction::Straight;
  if (name == "Right") return Direction::Right;
  throw ParseError("unknown direction word: '" + std::string(name) + "'");
}

double heading_offset(Direction d) {
  switch (d) {
    case Direction::Left: return kPi / 2.0;
    case Direction::Straight: return 0.0;
    case Direction::Right: return -kPi / 2.0;
  }
  return 0.0;
}

namespace {
constexpr std::array<const char*, 4> kStorePois = {
    kPoiHamburgerStore, kPoiCafe, kPoiPharmacy, kPoiConvenienceStore};
}

bool is_store_poi(std::string_view poi) {
  for (const char* p : kStorePois) {
    if (poi == p) return true;
  }
  return false;
}

bool is_known_poi(std::string_view poi) {
  return is_store_poi(poi) || poi == kPoiPickupPoint || poi == kPoiCorridor;
}

const char* store_action_poi(StoreAction a) {
  const int code = static_cast<int>(a);
  if (code < 1 || code > 4) {
    throw FormatError("store action has no POI name: " + std::to_string(code));
  }
  return kStorePois[static_cast<std::size_t>(code - 1)];
}

StoreAction store_action_for_poi(std::string_view poi) {
  for (std::size_t i = 0; i < kStorePois.size(); ++i) {
    if (poi == kStorePois[i]) return static_cast<StoreAction>(i + 1);
  }
  throw FormatError("POI is not a store: '" + std::string(poi) + "'");
}

std::string Action::serialize() const {
  std::string out;
  out += static_cast<char>('0' + static_cast<int>(direction));
  out += "|||";
  out += static_cast<char>('0' + static_cast<int>(store_action));
  return out;
}

Action Action::parse(std::string_view wire) {
  if (wire.size() != 5 || wire[1] != '|' || wire[2] != '|' || wire[3] != '|' ||
      wire[0] < '0' || wire[0] > '9' || wire[4] < '0' || wire[4] > '9') {
    throw FormatError("malformed action wire string: '" + std::string(wire) + "'");
  }
  return {direction_from_code(wire[0] - '0'), store_action_from_code(wire[4] - '0')};
}

}  // namespace shopsim
