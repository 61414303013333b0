#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bankflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched lengths or matrix shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside its admissible range (negative rate, zero service rate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model is well formed but the requested computation is not defined for it.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// The balance system has no unique normalized solution.
class NonUniqueSteadyStateError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a negative or non-finite level.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A delayed denominator of the interaction system vanished.
class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Syntax or semantic error in a text input, located by 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

}  // namespace bankflow
