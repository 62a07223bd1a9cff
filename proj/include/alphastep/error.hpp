#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alphastep {

enum class ErrorCode {
  EmptyInput,
  DuplicateRoots,
  NonFiniteInput,
  NotMonic,
  InvalidArgument,
  CriticalPointInput,
  CriticalPointEncountered,
  SingularStart,
  RootsUnknown,
  OracleFailure,
  ContinuationStall,
  ProfileMismatch,
  RunNotCertified,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateRoots: return "DuplicateRoots";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NotMonic: return "NotMonic";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CriticalPointInput: return "CriticalPointInput";
    case ErrorCode::CriticalPointEncountered: return "CriticalPointEncountered";
    case ErrorCode::SingularStart: return "SingularStart";
    case ErrorCode::RootsUnknown: return "RootsUnknown";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::ContinuationStall: return "ContinuationStall";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::RunNotCertified: return "RunNotCertified";
  }
  return "Unknown";
}

/// Single exception type for the library; the code carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace alphastep
