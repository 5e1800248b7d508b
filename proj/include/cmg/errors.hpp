#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmg {

enum class ErrorCode {
  NonStochasticRow,
  AbsorbingViolation,
  EmptyActionSet,
  BadDistribution,
  ProfileModelMismatch,
  InvalidModel,
  InvalidArgument,
  NotAbsorbingUnderStrategy,
  Unbounded,
  InfeasibleLP,
  ConstraintInfeasible,
  SlaterFailure,
  Schema,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// that the CLI and the Python layer can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmg
