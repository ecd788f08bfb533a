#pragma once

// Run configuration (schema 1). Command-line flags are applied on top of the
// parsed document by the CLI.

#include "tsl/hk_geometry.hpp"
#include "tsl/tropical_curve.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsl {

struct Tolerances {
  double parametrix = 1e-8;
  double h_grid = 0.05;
  double delta = -0.1;
};

struct RunConfig {
  std::optional<KahlerData> kahler;  // none: Euclidean with theta_hat = pi/2
  std::vector<double> T_list{5.0, 10.0, 20.0, 40.0};
  std::optional<std::vector<double>> free_phases;
  std::optional<std::uint64_t> free_phase_seed;  // from "seed:N"
  std::optional<std::uint64_t> seed;
  std::optional<double> clip_box;
  int resolution = 128;
  Tolerances tolerances;
  std::string out = "out";
};

/// Parses a schema-1 document. Throws SyntaxError or ConfigError.
RunConfig parse_config(const std::string& text);

/// Checks the invariants that depend on the curve and resolves defaults.
/// Throws ConfigError.
void finalize_config(RunConfig& cfg, const TropicalCurve& curve);

/// Explicit free phases, or the seeded draw.
std::vector<double> resolve_free_phases(const RunConfig& cfg, const TropicalCurve& curve);

}  // namespace tsl
