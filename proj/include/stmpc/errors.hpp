#pragma once

#include <stdexcept>

namespace stmpc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: bad dimensions, non-finite data, out-of-domain parameters.
struct InvalidInputError : Error {
  using Error::Error;
};

/// An iterative numerical routine exhausted its budget without converging.
struct NumericalFailureError : Error {
  using Error::Error;
};

/// Terminal-set synthesis cannot proceed (e.g. unstabilizable pair).
struct SynthesisFailureError : Error {
  using Error::Error;
};

/// The shortest pattern is infeasible at the initial state; the closed loop cannot start.
struct InitialInfeasibilityError : Error {
  using Error::Error;
};

/// The scheduler found no admissible pattern. Unreachable in a correct closed
/// loop; carries the offending step's context when raised.
struct ContractViolationError : Error {
  using Error::Error;
};

}  // namespace stmpc
