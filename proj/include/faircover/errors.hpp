#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace faircover {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a structural invariant (bad ids, negative cost, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Objective/solver settings that cannot work together.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Brute force refused: the search space is above the hard limit.
class TooLargeError : public Error {
 public:
  TooLargeError(std::string message, std::uint64_t subset_count)
      : Error(std::move(message)), subset_count_(subset_count) {}
  std::uint64_t subset_count() const noexcept { return subset_count_; }

 private:
  std::uint64_t subset_count_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed snapshot text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Snapshot references something that does not exist.
class IntegrityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace faircover
