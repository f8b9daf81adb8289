#pragma once
#include <stdexcept>
#include <string>

namespace polsim {

/// Base class for all simulator errors.
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFullyPolarized : SimError {
  using SimError::SimError;
};

struct StepTooCoarse : SimError {
  using SimError::SimError;
};

struct NoDarkWindowFound : SimError {
  using SimError::SimError;
};

struct GridMismatch : SimError {
  using SimError::SimError;
};

struct PowerOutOfRange : SimError {
  using SimError::SimError;
};

struct NoPilotPower : SimError {
  using SimError::SimError;
};

struct ZeroReferencePower : SimError {
  using SimError::SimError;
};

struct EmptySamples : SimError {
  using SimError::SimError;
};

struct InsufficientSamples : SimError {
  using SimError::SimError;
};

/// Scenario-file validation failure; message names the offending field.
struct ConfigError : SimError {
  using SimError::SimError;
};

}  // namespace polsim
