#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hqc {

enum class ErrorCode {
  NonPowerOfTwoLength,
  ZeroNorm,
  RegisterTooLarge,
  IndexOutOfRange,
  DuplicateTarget,
  SizeMismatch,
  ZeroProbabilityBranch,
  NotUnitary,
  NotProductState,
  NonFiniteLambda,
  NotNormalized,
  DegenerateOrdering,
  NotOrthogonal,
  UnsupportedChannelForPerfectPath,
  CopyCountOutOfRange,
  InvalidConfig,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPowerOfTwoLength: return "NonPowerOfTwoLength";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::RegisterTooLarge: return "RegisterTooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateTarget: return "DuplicateTarget";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ZeroProbabilityBranch: return "ZeroProbabilityBranch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotProductState: return "NotProductState";
    case ErrorCode::NonFiniteLambda: return "NonFiniteLambda";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DegenerateOrdering: return "DegenerateOrdering";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::UnsupportedChannelForPerfectPath: return "UnsupportedChannelForPerfectPath";
    case ErrorCode::CopyCountOutOfRange: return "CopyCountOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hqc
