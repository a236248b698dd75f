#include "popdyn/error.hpp"

namespace popdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::ProportionsDoNotSumToOne: return "ProportionsDoNotSumToOne";
    case ErrorCode::DuplicateThreshold: return "DuplicateThreshold";
    case ErrorCode::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::StateOutOfSpace: return "StateOutOfSpace";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::MalformedSet: return "MalformedSet";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace popdyn
