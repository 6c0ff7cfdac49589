#pragma once

#include <stdexcept>
#include <string>

namespace shopsim {

// Base type for all failures raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// World/config file violates a structural invariant.
struct InvalidConfig : Error {
  using Error::Error;
};

// Tag (or target) is not in front of the sensor.
struct NotInFront : Error {
  using Error::Error;
};

// Grasp attempted while the robot is outside the store interior.
struct NotInStore : Error {
  using Error::Error;
};

// Text does not contain a well-formed action / value.
struct FormatError : Error {
  using Error::Error;
};

// Action names a direction the current junction does not list.
struct InvalidDirection : Error {
  using Error::Error;
};

// Malformed persisted data (map, order, history, ...).
struct ParseError : Error {
  using Error::Error;
};

// More than one skill gate set at once; always a programming error.
struct MultipleGates : Error {
  using Error::Error;
};

// Order text contained no recognizable items.
struct EmptyOrder : Error {
  using Error::Error;
};

// Junction record lists no directions at all.
struct NoFeasibleDirection : Error {
  using Error::Error;
};

// LLM endpoint unreachable or returned an unusable response.
struct TransportError : Error {
  using Error::Error;
};

}  // namespace shopsim
