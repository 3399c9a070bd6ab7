#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace auxss {

// Bad or inconsistent configuration (unknown keys, out-of-range values,
// empty demo sets, buffer overflow on prefill).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (stepping a finished episode,
// episode length beyond the horizon, terminal start state for a safety
// estimate).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite network output or loss.
class Divergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ResetRejection { OutOfBounds, Lava, TooFast, NonFinite };

class InvalidReset : public std::invalid_argument {
 public:
  InvalidReset(ResetRejection reason, const std::string& what)
      : std::invalid_argument(what), reason_(reason) {}
  ResetRejection reason() const noexcept { return reason_; }

 private:
  ResetRejection reason_;
};

// Malformed file content. line() is 1-based, 0 when not line specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace auxss
