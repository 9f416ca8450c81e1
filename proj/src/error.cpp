#include "treephase/error.hpp"

namespace treephase {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientTrials: return "InsufficientTrials";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::RankTooSmall: return "RankTooSmall";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ConfigNotFound: return "ConfigNotFound";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::RuntimeFailure: return "RuntimeFailure";
  }
  return "Unknown";
}

}  // namespace treephase
