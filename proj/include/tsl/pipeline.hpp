#pragma once

// End-to-end runs behind the CLI subcommands. Each returns its artifacts as
// in-memory file contents so callers can compare runs without touching disk.

#include "tsl/config.hpp"
#include "tsl/serialize.hpp"
#include "tsl/tropical_curve.hpp"

#include <map>
#include <string>

namespace tsl {

using Artifacts = std::map<std::string, std::string>;  // file name -> bytes

enum class OutputFormat { Csv, Json, Binary };

OutputFormat parse_format(const std::string& name);

struct ValidationOutcome {
  bool passed = false;
  json report;
};

ValidationOutcome run_validate(const TropicalCurve& curve);

/// One serialized matching datum per T.
Artifacts run_compile(const TropicalCurve& curve, const RunConfig& cfg);

/// Rescaled base projections, one file per T.
Artifacts run_sample(const TropicalCurve& curve, const RunConfig& cfg, OutputFormat format);

struct LinearOutcome {
  bool passed = false;
  json report;  // diagnostics, or {error, message} when the solve failed
  std::string error_code;
  std::string message;
};

/// Parametrix solve on the metric graph of the curve at scale T.
LinearOutcome run_linear(const TropicalCurve& curve, const RunConfig& cfg, double T);

struct VerifyOutcome {
  Artifacts files;
  bool passed = false;
  std::string failed_criterion;  // first failure, empty on success
  std::string error_code;
  std::string message;
};

inline constexpr double kFinalDistance = 0.05;
inline constexpr double kDistanceRatio = 0.3;
inline constexpr double kDecaySlope = -0.2;

/// Convergence table, decay fits and linear-surrogate diagnostics plus a
/// summary. Needs at least three T values (ConfigError otherwise).
VerifyOutcome run_verify(const TropicalCurve& curve, const RunConfig& cfg);

}  // namespace tsl
