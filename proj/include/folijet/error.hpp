#pragma once

#include <stdexcept>
#include <string>

namespace folijet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FOLIJET_ERROR(Name)                    \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  };

FOLIJET_ERROR(OrderMismatch)
FOLIJET_ERROR(VarCountMismatch)
FOLIJET_ERROR(DomainError)
FOLIJET_ERROR(IndexOutOfRange)
FOLIJET_ERROR(UnknownFunction)
FOLIJET_ERROR(UnboundVariable)
FOLIJET_ERROR(UnknownVariable)
FOLIJET_ERROR(SchemaError)
FOLIJET_ERROR(InvariantViolation)
FOLIJET_ERROR(OutsideOverlap)
FOLIJET_ERROR(OrderError)
FOLIJET_ERROR(ShapeError)
FOLIJET_ERROR(ExcludedPoint)
FOLIJET_ERROR(SingularHessian)
FOLIJET_ERROR(SingularMetric)
FOLIJET_ERROR(NoConvergence)

#undef FOLIJET_ERROR

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column, std::string expected)
      : Error(message + " at line " + std::to_string(line) + ", column " +
              std::to_string(column) + (expected.empty() ? "" : " (expected " + expected + ")")),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  /// Same error, with the location of the offending text in a document.
  SyntaxError in(const std::string& path) const {
    return SyntaxError(path + ": " + what(), line_, column_, expected_, 0);
  }

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  SyntaxError(const std::string& full, int line, int column, std::string expected, int)
      : Error(full), line_(line), column_(column), expected_(std::move(expected)) {}

  int line_;
  int column_;
  std::string expected_;
};

}  // namespace folijet
