#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace divnorm {

// Malformed text input. `line` is 1-based when known, `offset` is a byte
// offset into the input when known; either may be zero when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t offset = 0)
      : std::runtime_error(what), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// Mathematically invalid input: non-stochastic rows, mismatched outcome
// spaces, failed preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace divnorm
