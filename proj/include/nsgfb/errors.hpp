#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsgfb {

enum class ErrorKind {
  ParseError,
  InvariantViolation,
  RetriesExhausted,
  DimensionMismatch,
  BudgetExceeded,
  ConvergenceFailure,
  CommonRoot,
  Degenerate,
  NotPositiveDefinite,
  KappaOne,
  LocalSingular,
  Diverged,
  BoundViolated,
  ZeroReference,
  MissingLabels,
  MissingCoordinates,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nsgfb
