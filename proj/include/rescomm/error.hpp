#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rescomm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside an operation's domain (non-finite
/// drive, dt <= 0, t < 0, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Scenario / configuration problems. Carries the 1-based source line when
/// the error came from a scenario file (0 when not line-addressed).
class ConfigError : public Error {
 public:
  enum class Kind { Syntax, UnknownKey, DanglingReference, Invariant, MissingSection };

  ConfigError(Kind kind, std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Numerical failure: non-finite derivative, quadrature that did not converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Simulation state became invalid (non-finite voltages, fractions out of range).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// The model cannot produce the requested behaviour with the given
/// parameters, e.g. no spike even at the upper threshold bracket.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a point where the closed form is singular.
class SingularityError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rescomm
