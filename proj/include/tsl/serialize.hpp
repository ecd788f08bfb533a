#pragma once

// JSON and CSV encodings of pipeline artifacts. Object keys come out sorted
// and doubles are written in shortest round-trip form, so equal inputs give
// byte-identical documents.

#include "tsl/glue.hpp"
#include "tsl/linear_surrogate.hpp"
#include "tsl/phase_solver.hpp"
#include "tsl/polynomial.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace tsl {

using nlohmann::json;

/// [{m: [i, j], re, im}, ...] ordered by exponent.
json laurent_to_json(const LaurentPoly& p);
LaurentPoly laurent_from_json(const json& j);

/// {theta: {edge: angle}, free: [[edge, value], ...]}.
json phases_to_json(const PhaseAssignment& a);
PhaseAssignment phases_from_json(const json& j);

json matrix_to_json(const IntMatrix& m);
json datum_to_json(const MatchingDatum& d);

json diagnostics_to_json(const ParametrixDiagnostics& d);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t);
json convergence_to_json(const ConvergenceTable& t);

/// Points as a JSON document {dim, points: [[...], ...]}.
json cloud_to_json(const PointCloud& c);

/// Finite doubles as numbers, infinities as null.
json number_or_null(double x);

/// Pretty-printed dump with a trailing newline.
std::string dump(const json& j);

}  // namespace tsl
