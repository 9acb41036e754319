#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dts {

// Base class for all library errors. `kind()` is a stable lowercase tag the
// CLI reuses for machine-readable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("parse", w) {}
};

struct NameError : Error {
  explicit NameError(const std::string& w) : Error("unknown-name", w) {}
};

struct TypeError : Error {
  explicit TypeError(const std::string& w) : Error("type", w) {}
};

// Violated construction invariant (bad domain, mismatched team vars, ...).
struct ValueError : Error {
  explicit ValueError(const std::string& w) : Error("value", w) {}
};

struct EvalError : Error {
  explicit EvalError(const std::string& w) : Error("eval", w) {}
};

// A configured search or enumeration budget was exceeded. Always loud, never
// a silent truncation.
struct CapExceeded : Error {
  explicit CapExceeded(const std::string& w) : Error("cap", w) {}
};

// Game-specific precondition failures (e.g. a quantifier of a type other
// than (1) inside the game engine).
struct GameError : Error {
  explicit GameError(const std::string& w) : Error("game", w) {}
};

// The strategy search ran out of its candidate budget; the instance is
// inconclusive, not negative.
struct SearchCapExceeded : Error {
  explicit SearchCapExceeded(const std::string& w) : Error("search-cap", w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error("io", w) {}
};

}  // namespace dts
