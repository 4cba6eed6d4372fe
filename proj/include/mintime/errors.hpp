#pragma once

#include <stdexcept>
#include <string>

namespace mintime {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed caller input: dimension mismatches, empty vertex lists, bad rationals.
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Operation needs explicit facet/vertex enumeration, only available in dim <= 3.
struct UnsupportedDimensionError : Error {
  explicit UnsupportedDimensionError(const std::string& msg) : Error(msg) {}
};

// Caller asked for an in-set formula at an out-of-set point or vice versa.
struct WrongRegimeError : Error {
  explicit WrongRegimeError(const std::string& msg) : Error(msg) {}
};

// Projection requested where the minimal time is infinite.
struct EmptyProjectionError : Error {
  explicit EmptyProjectionError(const std::string& msg) : Error(msg) {}
};

// Scene/report deserialization failure; carries a human-locatable context string.
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace mintime
