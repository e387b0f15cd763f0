#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pivotree {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two vectors (or a vector and an index) live in term spaces of different size.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A candidate pivot lies (numerically) inside the span of the current basis.
class DegeneratePivot : public Error {
 public:
  using Error::Error;
};

/// Every document of a node has the same split coordinate.
class UnsplittableNode : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be non-negative came out clearly negative.
class NumericalDrift : public Error {
 public:
  using Error::Error;
};

/// Malformed corpus or query text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Corrupt, truncated or incompatible index file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace pivotree
