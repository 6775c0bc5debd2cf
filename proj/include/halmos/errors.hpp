#pragma once

#include <stdexcept>
#include <string>

namespace halmos {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (algebra files, formula DSL, point lists, ...).
/// Carries a 1-based position so callers can point at the offending spot.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column = 0)
      : Error(message + " (line " + std::to_string(line) +
              (column > 0 ? ", column " + std::to_string(column) : std::string()) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A computation would exceed a configured size budget.  The message names
/// the size that would have been required; nothing is silently truncated.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Operands that do not belong together: different signatures, different
/// point spaces, a substitution applied outside its domain, and so on.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace halmos
