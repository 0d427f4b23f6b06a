#include "coreprune/error.hpp"

namespace coreprune {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AllPointsIdentical: return "AllPointsIdentical";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::InvalidSampleSize: return "InvalidSampleSize";
    case ErrorKind::AllQueriesDegenerate: return "AllQueriesDegenerate";
    case ErrorKind::NoValidQuery: return "NoValidQuery";
    case ErrorKind::BudgetTooLarge: return "BudgetTooLarge";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::Io: return "Io";
    case ErrorKind::BadManifest: return "BadManifest";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AllPointsIdentical:
    case ErrorKind::DegenerateInput:
    case ErrorKind::NoConvergence:
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::Infeasible:
    case ErrorKind::NumericalBreakdown:
    case ErrorKind::AllQueriesDegenerate:
    case ErrorKind::NoValidQuery:
      return true;
    default:
      return false;
  }
}

}  // namespace coreprune
