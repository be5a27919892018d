#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Configuration/input faults. Messages name the offending field or quantity.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error("schema: " + msg) {}
};

struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& msg) : std::runtime_error("invariant: " + msg) {}
};

// Moment sum is zero (or otherwise outside the domain of log).
struct DivergedError : std::runtime_error {
  explicit DivergedError(const std::string& msg) : std::runtime_error("diverged: " + msg) {}
};

// Root bracketing left |t| > 1e3 without enclosing a root.
struct BracketError : std::runtime_error {
  explicit BracketError(const std::string& msg) : std::runtime_error("bracket: " + msg) {}
};

struct EmptyJError : std::runtime_error {
  explicit EmptyJError(const std::string& msg) : std::runtime_error("empty J: " + msg) {}
};

// Requested tree depth exceeds the sampled-capacity guard.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error("capacity: " + msg) {}
};

// Word path extends past the realized depth.
struct DepthError : std::runtime_error {
  explicit DepthError(const std::string& msg) : std::runtime_error("depth: " + msg) {}
};

// Increasing-coordinate table is not strictly increasing.
struct NonMonotoneError : std::runtime_error {
  explicit NonMonotoneError(const std::string& msg) : std::runtime_error("non-monotone: " + msg) {}
};

// Requested bin width is below the 2^-40 resolution floor.
struct BinningError : std::runtime_error {
  explicit BinningError(const std::string& msg) : std::runtime_error("binning: " + msg) {}
};

struct EmptyBallError : std::runtime_error {
  explicit EmptyBallError(const std::string& msg) : std::runtime_error("empty ball: " + msg) {}
};

// Too few usable scales/cells for a fit.
struct DegenerateError : std::runtime_error {
  explicit DegenerateError(const std::string& msg) : std::runtime_error("degenerate: " + msg) {}
};

struct OutOfRangeError : std::runtime_error {
  explicit OutOfRangeError(const std::string& msg) : std::runtime_error("out of range: " + msg) {}
};

// Law fails the standing assumptions required by theorem-level commands.
struct AssumptionError : std::runtime_error {
  explicit AssumptionError(const std::string& msg) : std::runtime_error("assumption: " + msg) {}
};

}  // namespace cascade
