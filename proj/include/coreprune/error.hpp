#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coreprune {

enum class ErrorKind {
  InvalidParameter,
  DimensionMismatch,
  AllPointsIdentical,
  DegenerateInput,
  NoConvergence,
  NotPositiveDefinite,
  Infeasible,
  NumericalBreakdown,
  InvalidSampleSize,
  AllQueriesDegenerate,
  NoValidQuery,
  BudgetTooLarge,
  BadMagic,
  UnsupportedDtype,
  TruncatedPayload,
  Io,
  BadManifest,
};

std::string_view to_string(ErrorKind kind);

// Input errors map to CLI exit code 2, numerical failures to 3.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace coreprune
