#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpp {

enum class ErrorCode {
  kInvalidSpec,
  kNotAdjacent,
  kOutOfBox,
  kEdgeOutOfBox,
  kUnknownDimension,
  kBudgetExceeded,
  kRegionOutOfBox,
  kInvalidDelta,
  kConstructionBlocked,
  kNotSelfAvoiding,
  kInvariantViolated,
  kUnboundedWeights,
  kSamePosition,
  kMalformedPlan,
  kConfigInvalid,
  kInsufficientData,
  kRuntimeFailure,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fpp
