#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace padendro {

// Base class for every domain error raised by the library. The CLI maps
// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPrime : public Error {
 public:
  using Error::Error;
};

class PrimeMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicatePoint : public Error {
 public:
  DuplicatePoint(std::size_t first, std::size_t second, const std::string& point)
      : Error("duplicate point '" + point + "' at indices " + std::to_string(first) + " and " +
              std::to_string(second)),
        first_(first),
        second_(second) {}

  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class TooFewPoints : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotUltrametric : public Error {
 public:
  using Error::Error;
};

class BranchingExceedsAlphabet : public Error {
 public:
  using Error::Error;
};

class UnsupportedMeasure : public Error {
 public:
  using Error::Error;
};

class CollisionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed textual input. line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace padendro
