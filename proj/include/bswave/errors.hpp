#pragma once

#include <stdexcept>
#include <string>

namespace bswave {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad geometry, non-conforming mesh, malformed input file.
struct ValidationError : Error {
  using Error::Error;
};

/// Parse failure with file/line context.
struct ParseError : Error {
  using Error::Error;
};

/// Parameter outside the model's validity range.
struct ModelError : Error {
  using Error::Error;
};

/// Linear or nonlinear solver did not reach its tolerance.
struct SolverError : Error {
  using Error::Error;
};

/// The per-step energy-restoring root solve failed.
struct RelaxationError : Error {
  using Error::Error;
};

/// A time integration run aborted (solver failure, relaxation failure,
/// or divergence detection). Carries the time and step of the abort.
struct IntegrationError : Error {
  double t;
  long step;
  IntegrationError(const std::string& msg, double t_, long step_)
      : Error(msg), t(t_), step(step_) {}
};

}  // namespace bswave
