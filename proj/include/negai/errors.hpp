// Error types shared by every negai module.
#pragma once

#include <stdexcept>
#include <string>

namespace negai {

// Argument outside the mathematical domain of a mechanism (negative distance,
// adoption outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent shapes: matrix dimension does not match the ward count, etc.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid parameters or configuration files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an estimator cannot identify its target (no controls, no
// first-stage variation, no overlap, ...).
class IdentificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quantity is mathematically undefined for the given input (Gini of an
// all-zero vector, LQ with an empty margin, offset with no aging decline).
class UndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value produced during simulation. `field` names the offender.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Input file problems (missing file, malformed CSV). `line` is 1-based, 0 if
// not applicable.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A step failed during `run`; `year()` is the year being computed.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(int year, const std::string& what)
      : std::runtime_error("year " + std::to_string(year) + ": " + what), year_(year) {}
  int year() const noexcept { return year_; }

 private:
  int year_;
};

}  // namespace negai
