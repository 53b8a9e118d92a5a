#pragma once

#include <stdexcept>
#include <string>

namespace crcap {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration value is missing, malformed or violates a type invariant.
/// `field()` names the offending entry so callers can report it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Valid in principle but not supported by the analytical model
/// (e.g. Rician/Rician with unequal K factors).
class UnsupportedConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& message, double estimate, double error_bound)
      : std::runtime_error(message + " (estimate " + std::to_string(estimate) +
                           ", error bound " + std::to_string(error_bound) + ")"),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// Too few (conditioned) samples for a Monte Carlo statistic.
class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed probability landed outside [0,1] by more than the allowed slack.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crcap
