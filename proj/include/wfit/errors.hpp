#pragma once

#include <stdexcept>
#include <string>

namespace wfit {

/// Argument outside the mathematical domain of a function (x <= 0 for log_gamma, u outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Distribution parameters that violate the family's invariants.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Observation outside the support of the distribution (GW with lambda > 0).
class SupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Sample without enough spread for the requested computation.
class DegenerateSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoAdmissibleModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line and column of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string token, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what + " ('" + token + "')"),
        line_(line),
        column_(column),
        token_(std::move(token)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file without a single data record.
class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wfit
