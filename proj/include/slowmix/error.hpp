#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slowmix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network DSL or path file. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A network that is syntactically fine but violates a structural invariant.
class NetworkError : public Error {
 public:
  using Error::Error;
};

/// A state with a negative coordinate was produced or requested.
class NegativeStateError : public Error {
 public:
  using Error::Error;
};

/// Network is outside the two-species cyclic class.
class UnsupportedClassError : public Error {
 public:
  using Error::Error;
};

/// A transition sequence leaves the non-negative orthant from the requested start.
class InfeasiblePathError : public Error {
 public:
  using Error::Error;
};

/// Simulation requested from a state where every propensity vanishes.
class AbsorbingStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowmix
