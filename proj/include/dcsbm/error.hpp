#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcsbm {

enum class ErrorCode {
  kInvalidSystem,
  kInvalidTransform,
  kInvalidArgument,
  kZeroRow,
  kRankMismatch,
  kClusterCountMismatch,
  kTooSmall,
  kNonIdentifiable,
  kPatternMismatch,
  kRangeError,
  kEmptyInput,
  kParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSystem: return "InvalidSystem";
    case ErrorCode::kInvalidTransform: return "InvalidTransform";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kRankMismatch: return "RankMismatch";
    case ErrorCode::kClusterCountMismatch: return "ClusterCountMismatch";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kNonIdentifiable: return "NonIdentifiable";
    case ErrorCode::kPatternMismatch: return "PatternMismatch";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dcsbm
