#pragma once

#include <stdexcept>
#include <string>

namespace bandit {

enum class ErrorCode {
  kInvalidArgument,
  kNumericalDegradation,
  kConstructionFailure,
  kIoError,
  kEmptyClass,
  kGapUndefined,
  kProtocolViolation,
  kNoSolution,
  kInvalidCombination,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNumericalDegradation: return "numerical-degradation";
    case ErrorCode::kConstructionFailure: return "construction-failure";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kEmptyClass: return "empty-class";
    case ErrorCode::kGapUndefined: return "gap-undefined";
    case ErrorCode::kProtocolViolation: return "protocol-violation";
    case ErrorCode::kNoSolution: return "no-solution";
    case ErrorCode::kInvalidCombination: return "invalid-combination";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

}  // namespace bandit
