#pragma once

#include <stdexcept>
#include <string>

namespace necklace {

// Malformed input text (quiver files, expression strings). line/col are
// 1-based and point at the first offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(std::move(msg)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Structurally valid input that violates a semantic precondition:
// unknown arrow or vertex id, non-closed word where a cycle is required,
// an operator order that is out of range, and the like.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

}  // namespace necklace
