#pragma once

#include <stdexcept>
#include <string>

namespace cbond {

/// Invalid model parameters or an input outside an operation's domain.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The free-boundary root search found no sign change. Usually a sign of a
/// parameter/regime inconsistency (the equation only has a root in Case III).
struct BracketError : std::runtime_error {
  explicit BracketError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Policy iteration did not stabilize within the iteration budget.
struct NoConvergenceError : std::runtime_error {
  NoConvergenceError(const std::string& msg, double last_residual)
      : std::runtime_error(msg), residual(last_residual) {}
  double residual;
};

/// One of the smooth-pasting checks failed.
struct PastingViolation : std::runtime_error {
  explicit PastingViolation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inconsistent discretization/simulation configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two results built from different parameter sets were combined.
struct ParamMismatch : std::runtime_error {
  explicit ParamMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

/// Simulation asked for a nonpositive number of paths.
struct SeedError : std::runtime_error {
  explicit SeedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A reproduced table cell fell outside its tolerance.
struct MismatchError : std::runtime_error {
  explicit MismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cbond
