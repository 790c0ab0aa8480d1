#pragma once

#include <stdexcept>
#include <string>

namespace qgld {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonHermitianInput,
  SingularMatrix,
  NotPositiveSemidefinite,
  RankDeficientBlock,
  DegenerateEigenvalue,
  IndexOutOfRange,
  NotInGroundRegister,
  UnnormalizedTarget,
  FamilySizeMismatch,
  NonUnitaryMember,
  UnnormalizedPhi,
  ProbabilityOutOfRange,
  FlatDistribution,
  NearZeroEigenvalue,
  IllConditioned,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// True for failures caused by the numbers themselves rather than by a
// malformed request (the CLI maps these to a distinct exit code).
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qgld
