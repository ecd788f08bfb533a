#pragma once

// Global solution of the per-vertex phase balancing constraints
//   sum_{e at v} theta_e = N_v pi  (mod 2 pi)
// parametrized by |E| - |V| free edge phases.

#include "tsl/tropical_curve.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tsl {

struct PhaseAssignment {
  std::map<std::string, double> theta;  // edge id -> angle in [0, 2pi)
  std::vector<std::pair<std::string, double>> free_params;

  friend bool operator==(const PhaseAssignment&, const PhaseAssignment&) = default;
};

/// Which edges are free and in which order vertices solve their pivot edge.
struct EliminationPlan {
  std::vector<std::string> free_edges;                         // sorted by id
  std::vector<std::pair<std::string, std::string>> steps;      // (vertex, solved edge)
};

std::size_t moduli_dimension(const TropicalCurve& curve);

/// Deterministic plan: a spanning tree of the graph with all external edges
/// joined to a point at infinity, built greedily with external edges first
/// and then by descending edge id. Tree edges are solved leaves-first (lowest
/// vertex id first); the rest are free. Throws OverConstrained when no
/// spanning tree reaches every vertex.
EliminationPlan elimination_plan(const TropicalCurve& curve);

/// Throws OverConstrained (bad plan) or DimensionMismatch (wrong count).
PhaseAssignment solve_phases(const TropicalCurve& curve, const std::vector<double>& free_values);

/// Seeded free values uniform in [0, 2pi).
std::vector<double> random_free_values(const TropicalCurve& curve, std::uint64_t seed);

/// |(sum theta_e - N_v pi)| reduced to [0, pi].
double vertex_residual(const TropicalCurve& curve, const PhaseAssignment& a, const std::string& vertex);
double max_vertex_residual(const TropicalCurve& curve, const PhaseAssignment& a);

struct GenericityResult {
  PhaseAssignment assignment;
  int attempts = 0;  // 0 when the input was already generic
  std::vector<std::string> warnings;
};

/// Throws a tsl::Error to reject an assignment; may append warnings.
using GenericityCheck = std::function<void(const PhaseAssignment&, std::vector<std::string>&)>;

inline constexpr int kGenericityAttempts = 50;
inline constexpr double kGenericityStep = 1e-2;

/// Retries with seeded perturbations of the free parameters (each of
/// magnitude at most 1e-2, applied to the original values) until `check`
/// accepts. Throws GenericityExhausted after 50 rejected perturbations.
GenericityResult genericity_sample(const TropicalCurve& curve, const PhaseAssignment& assignment,
                                   std::uint64_t seed, const GenericityCheck& check);

}  // namespace tsl
