#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparks {

// Malformed or truncated model/codebook file. Carries the byte offset at
// which decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Training diverged (NaN/inf loss). Carries the step index where it happened.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, long step)
      : std::runtime_error(what + " (at step " + std::to_string(step) + ")"),
        step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

// An operation was called out of order, e.g. backward before forward.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal accounting produced a non-integer value for a geometry that should
// be exact.
class AccountingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparks
