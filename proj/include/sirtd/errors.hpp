#pragma once

#include <stdexcept>
#include <string>

namespace sirtd {

// Base for every error raised by the library. Subclasses map onto the CLI
// exit codes: ValidationError -> 2, NumericalError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidConfig : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// --- ode -------------------------------------------------------------------

class MaxStepsExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// --- mcmc ------------------------------------------------------------------

class InitializationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// --- io --------------------------------------------------------------------

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : ValidationError(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class NonMonotoneDeaths : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DateGap : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyJoin : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvariantViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace sirtd
