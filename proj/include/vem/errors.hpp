#pragma once

#include <stdexcept>
#include <string>

namespace vem {

/// Base class for all solver errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A user-supplied evaluator returned a non-finite value.
struct EvaluationError : Error {
  using Error::Error;
};

/// An evaluator reported a shape inconsistent with the declared dimensions.
struct DimensionError : Error {
  using Error::Error;
};

/// Packed state vector has the wrong length for the declared layout.
struct LayoutError : Error {
  using Error::Error;
};

/// A fundamental matrix is singular or its condition estimate exceeds the guard.
struct TransitionConditioningError : Error {
  using Error::Error;
};

/// The multiplier system is singular; the terminal constraint is not
/// controllable through the current control directions.
struct ControllabilityError : Error {
  using Error::Error;
};

/// The initial trajectory violates the feasibility tolerance.
struct InfeasibleInitError : Error {
  using Error::Error;
};

}  // namespace vem
