#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbrouwer {

enum class ErrorKind {
  InvalidDimension,
  InvalidArgument,
  InvalidCombination,
  Domain,
  Covering,
  Resource,
  Hypothesis,
  NoConvergence,
  Inconsistency,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so front ends can map
/// it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the fixed-point search; keeps the best residual it reached.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, double best_residual)
      : Error(ErrorKind::NoConvergence, message), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Raised when a sample grid would exceed its budget.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& message, double minimal_feasible_alpha)
      : Error(ErrorKind::Resource, message), minimal_feasible_alpha_(minimal_feasible_alpha) {}

  /// Smallest alpha whose grid fits the budget, or 0 when not applicable.
  double minimal_feasible_alpha() const noexcept { return minimal_feasible_alpha_; }

 private:
  double minimal_feasible_alpha_;
};

}  // namespace qbrouwer
