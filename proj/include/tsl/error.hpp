#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsl {

/// Stable error codes. The CLI prints these verbatim in its JSON error line,
/// so renaming one is a breaking change.
enum class ErrorCode {
  ZeroVector,
  RankMismatch,
  NotSaturated,
  SyntaxError,
  SchemaError,
  GeometryError,
  UnknownVertex,
  Unbalanced,
  RootCollision,
  PhaseInconsistent,
  Inconclusive,
  OverConstrained,
  GenericityExhausted,
  ZeroCoordinate,
  EmptyWindow,
  ComponentNotFound,
  MatchFailure,
  OverlapTooShort,
  DimensionMismatch,
  EdgeTooShort,
  NotInRange,
  NonZeroMean,
  NoConvergence,
  Divergence,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsl
