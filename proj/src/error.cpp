#include "tsl/error.hpp"

namespace tsl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::GeometryError: return "GeometryError";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::RootCollision: return "RootCollision";
    case ErrorCode::PhaseInconsistent: return "PhaseInconsistent";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::OverConstrained: return "OverConstrained";
    case ErrorCode::GenericityExhausted: return "GenericityExhausted";
    case ErrorCode::ZeroCoordinate: return "ZeroCoordinate";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::ComponentNotFound: return "ComponentNotFound";
    case ErrorCode::MatchFailure: return "MatchFailure";
    case ErrorCode::OverlapTooShort: return "OverlapTooShort";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EdgeTooShort: return "EdgeTooShort";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tsl
