#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdattack {

enum class ErrorKind {
  DimensionMismatch,
  NonFinite,
  SingularMatrix,
  ConvergenceFailure,
  Overflow,
  NotHurwitz,
  AsymmetricQ,
  Asymmetric,
  NotPositiveDefinite,
  NonFiniteState,
  DecompositionFailed,
  EmptyTrace,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind; every failure in the library
/// surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pdattack
