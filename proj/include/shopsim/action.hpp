#pragma once

#include <string>
#include <string_view>

#include "shopsim/errors.hpp"
#include "shopsim/geometry.hpp"

namespace shopsim {

// Branch choice at a junction, relative to the signboard heading.
enum class Direction : int { Left = 1, Straight = 2, Right = 3 };

// Second half of the action grammar: which store to enter, or no entry.
enum class StoreAction : int {
  HamburgerStore = 1,
  Cafe = 2,
  Pharmacy = 3,
  ConvenienceStore = 4,
  NoEntry = 5,
};

Direction direction_from_code(int code);          // throws FormatError
StoreAction store_action_from_code(int code);     // throws FormatError

const char* direction_name(Direction d);          // "Left" / "Straight" / "Right"
Direction direction_from_name(std::string_view);  // throws ParseError

// Heading offset applied to a signboard heading: Left +pi/2, Straight 0,
// Right -pi/2.
double heading_offset(Direction d);

// POI vocabulary. Store actions 1..4 map onto the first four names.
inline constexpr const char* kPoiHamburgerStore = "hamburger store";
inline constexpr const char* kPoiCafe = "cafe";
inline constexpr const char* kPoiPharmacy = "pharmacy";
inline constexpr const char* kPoiConvenienceStore = "convenience store";
inline constexpr const char* kPoiPickupPoint = "pickup point";
inline constexpr const char* kPoiCorridor = "corridor";

bool is_store_poi(std::string_view poi);
bool is_known_poi(std::string_view poi);
const char* store_action_poi(StoreAction a);           // throws FormatError for NoEntry
StoreAction store_action_for_poi(std::string_view poi);  // throws FormatError

// Validated (direction, store action) pair. Wire form is `<d>|||<a>` with
// exactly three pipes and no whitespace.
struct Action {
  Direction direction = Direction::Left;
  StoreAction store_action = StoreAction::NoEntry;

  std::string serialize() const;
  static Action parse(std::string_view wire);  // strict full-string parse

  bool operator==(const Action&) const = default;
};

}  // namespace shopsim
