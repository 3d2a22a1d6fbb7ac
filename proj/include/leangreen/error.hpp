#pragma once

#include <stdexcept>
#include <string>

namespace leangreen {

// Every failure the library reports derives from Error so callers can map
// families of failures onto exit codes without catching std::exception.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be read or did not match the document schema.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class SchemaError : public InputError {
 public:
  SchemaError(std::string field, const std::string& what)
      : InputError(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Raised while running the event loop.
class SimulationError : public Error {
 public:
  using Error::Error;
};

class SchedulingInPast : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class StalledSimulation : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// Arithmetic preconditions of the metric and energy formulas.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public DomainError {
 public:
  using DomainError::DomainError;
};
class NegativeDuration : public DomainError {
 public:
  using DomainError::DomainError;
};
class ZeroEnergy : public DomainError {
 public:
  using DomainError::DomainError;
};
class ZeroTotalEnergy : public DomainError {
 public:
  using DomainError::DomainError;
};
class ZeroCycle : public DomainError {
 public:
  using DomainError::DomainError;
};
class VAExceedsCycle : public DomainError {
 public:
  using DomainError::DomainError;
};
class VAExceedsTotal : public DomainError {
 public:
  using DomainError::DomainError;
};
class TooFewReplications : public DomainError {
 public:
  using DomainError::DomainError;
};
class InsufficientData : public DomainError {
 public:
  using DomainError::DomainError;
};
class ZeroBaseline : public DomainError {
 public:
  using DomainError::DomainError;
};

// Artifacts that do not belong together.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigReportMismatch : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};
class FingerprintMismatch : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

// Scenario edit failures.
class ScenarioError : public InputError {
 public:
  using InputError::InputError;
};
class UnknownStation : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};
class InvalidMerge : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};
class ValidationFailed : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

}  // namespace leangreen
