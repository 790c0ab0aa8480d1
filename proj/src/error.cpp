#include "qgld/error.hpp"

namespace qgld {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::RankDeficientBlock: return "RankDeficientBlock";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotInGroundRegister: return "NotInGroundRegister";
    case ErrorCode::UnnormalizedTarget: return "UnnormalizedTarget";
    case ErrorCode::FamilySizeMismatch: return "FamilySizeMismatch";
    case ErrorCode::NonUnitaryMember: return "NonUnitaryMember";
    case ErrorCode::UnnormalizedPhi: return "UnnormalizedPhi";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::FlatDistribution: return "FlatDistribution";
    case ErrorCode::NearZeroEigenvalue: return "NearZeroEigenvalue";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix:
    case ErrorCode::NotPositiveSemidefinite:
    case ErrorCode::RankDeficientBlock:
    case ErrorCode::DegenerateEigenvalue:
    case ErrorCode::FlatDistribution:
    case ErrorCode::NearZeroEigenvalue:
    case ErrorCode::IllConditioned:
      return true;
    default:
      return false;
  }
}

}  // namespace qgld
