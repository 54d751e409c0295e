#include "nsgfb/errors.hpp"

namespace nsgfb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::CommonRoot: return "CommonRoot";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::KappaOne: return "KappaOne";
    case ErrorKind::LocalSingular: return "LocalSingular";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::MissingCoordinates: return "MissingCoordinates";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nsgfb
