#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace popdyn {

/// Module-level error conditions. Every thrown popdyn::Error carries one of these.
enum class ErrorCode {
  MalformedNumber,
  MalformedConfig,
  ProportionsDoNotSumToOne,
  DuplicateThreshold,
  ThresholdOutOfRange,
  IndexOutOfRange,
  StateOutOfSpace,
  StateSpaceTooLarge,
  AssumptionViolated,
  NoProgress,
  MalformedSet,
  InvalidSize,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace popdyn
