#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>

namespace topns {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented range (T <= 0, k == 0, n >= 2*sqrt(3), ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The input has too few finite entries for the requested statistic.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-representable intermediate.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `row()` is the zero-based row index, or -1 for header errors.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long long row = -1)
      : Error(row >= 0 ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

  long long row() const noexcept { return row_; }

 private:
  long long row_;
};

}  // namespace topns
