// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace swrls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// profile
class RangeError : public Error {
 public:
  using Error::Error;
};
class DropConditionError : public Error {
 public:
  using Error::Error;
};
class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};
class WindowError : public Error {
 public:
  using Error::Error;
};

// densela
class SingularUpdateError : public Error {
 public:
  using Error::Error;
};
class IntermediateSingularityError : public Error {
 public:
  IntermediateSingularityError(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}
  /// Index of the rank-one step whose denominator collapsed.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// regressor
class NyquistError : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};

// estimator
class WindowTooSmallError : public Error {
 public:
  using Error::Error;
};
class IndexGapError : public Error {
 public:
  using Error::Error;
};
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// ingest
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};
class CalendarError : public Error {
 public:
  using Error::Error;
};
class GapError : public Error {
 public:
  using Error::Error;
};

}  // namespace swrls
