#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qp {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: schema violations, family restrictions, out-of-range settings.
// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// Value outside the mean domain / parameter domain.
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

// Malformed input file; message carries the line number.
struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};

// Not enough observations for the requested estimator (n <= p).
struct DofError : ValidationError {
  using ValidationError::ValidationError;
};

// Numerical failures. The CLI maps these to exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

// Non-finite log-quasi-likelihood contribution; carries the observation index.
struct EvalError : NumericalError {
  EvalError(const std::string& what, std::int64_t obs_index)
      : NumericalError(what), index(obs_index) {}
  std::int64_t index;
};

struct SingularError : NumericalError {
  using NumericalError::NumericalError;
};

struct QuadratureError : NumericalError {
  using NumericalError::NumericalError;
};

// Sampler could not find a valid initial state.
struct InitError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace qp
