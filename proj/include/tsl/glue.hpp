#pragma once

// End-to-end matching data: per-vertex frames and well-centred polynomials,
// shared edge cylinders, cutoff pregluing, the gluing-error surrogate and the
// Hausdorff convergence test against the tropical curve.

#include "tsl/hk_geometry.hpp"
#include "tsl/phase_solver.hpp"
#include "tsl/point_cloud.hpp"
#include "tsl/tropical_curve.hpp"
#include "tsl/vertex_builder.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsl {

/// T- and phase-independent data of one vertex.
struct VertexSkeleton {
  std::string vertex;
  UnimodularFrame frame;
  std::vector<std::string> edge_ids;
  std::vector<Vec2> rays;  // first two frame coordinates of each outward direction
  NewtonPolygon polygon;
  std::vector<std::vector<std::string>> facet_edges;  // sorted by edge id
};

VertexSkeleton vertex_skeleton(const TropicalCurve& curve, const std::string& vertex);

/// Facet phases read from the assignment, facet by facet.
std::vector<std::vector<double>> facet_phases(const VertexSkeleton& sk, const PhaseAssignment& a);

/// Seed for interior coefficients of vertex `index`, or none for genus 0.
std::optional<std::uint64_t> interior_seed(const VertexSkeleton& sk, std::uint64_t seed, std::size_t index);

struct VertexModel {
  VertexSkeleton skeleton;
  ReducedKahler reduced;
  LaurentPoly poly;
  std::array<double, 2> shift{0.0, 0.0};  // T * first two frame coordinates of h(v)
  std::vector<double> p_v;                // T * remaining frame coordinates
};

/// The end of a vertex model along one of its edges.
struct HalfCylinder {
  std::string vertex;
  std::string edge;
  IntVec direction;                // outward from `vertex`
  std::vector<double> base_point;  // T h(vertex)
  Complex root;                    // facet root carrying this edge
};

struct MatchingDatum {
  TropicalCurve curve;
  KahlerData kahler;
  double T = 1.0;
  std::uint64_t seed = 0;
  PhaseAssignment phases;
  int genericity_attempts = 0;
  std::vector<std::string> warnings;
  std::vector<VertexModel> vertices;
  std::vector<CylinderModel> cylinders;
  std::vector<HalfCylinder> halves;

  const VertexModel& vertex(const std::string& id) const;
};

inline constexpr double kOverlapThreshold = 8.0;

/// Runs the whole compiler: frames, polygons, phases, genericity retries,
/// well-centred polynomials and cylinders. Throws Unbalanced or RankMismatch
/// when the curve fails validation, plus anything raised upstream.
MatchingDatum build_matching(const TropicalCurve& curve, const KahlerData& kahler, double T,
                             const std::vector<double>& free_phases, std::uint64_t seed);

struct MatchingReport {
  bool passed = true;
  std::vector<std::string> failures;
  double l_min = 0.0;  // +inf without internal edges
  double l_max = 0.0;
  double ratio = 1.0;
  double max_phase_residual = 0.0;
};

MatchingReport check_matching(const MatchingDatum& datum);

/// Quintic smoothstep 6x^5 - 15x^4 + 10x^3 clamped to [0, 1], and derivatives.
double smoothstep(double x);
double smoothstep_d1(double x);
double smoothstep_d2(double x);

struct GluedProfile {
  std::vector<double> s;
  std::vector<double> c_left, c_right, chi_left, chi_right, glued;
};

using Profile = std::function<double(double)>;

/// Profiles on s in [-l/2, l/2]: chi_left = 1 for s <= -2, 0 for s >= -1,
/// mirrored on the right. Throws OverlapTooShort for l < 8.
GluedProfile preglue_profile(const Profile& c_left, const Profile& c_right, double l, double ds = 0.01);

/// Exponential fit c(t) = A exp(-rate t) of one end, t the base distance
/// from the vertex.
struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double slope_R = 0.0;  // slope in the logarithmic coordinate R
};

DecayFit fit_end_decay(const MatchingDatum& datum, const std::string& vertex, const std::string& edge);

struct EdgeError {
  double band_lo = -2.0;
  double band_hi = 2.0;
  double sup_error = 0.0;
};

/// Surrogate gluing error |2 c' chi' + c chi''| per internal edge; zero
/// outside the cutoff bands by construction.
std::map<std::string, EdgeError> err_estimate(const MatchingDatum& datum);

struct ConvergenceRow {
  double T = 0.0;
  double d_hausdorff = 0.0;
  std::size_t points = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double fitted_rate = 0.0;  // slope of log d against log T
  double clip_box = 0.0;
};

struct ConvergenceOptions {
  int resolution = 128;
  std::optional<double> clip_box;  // default 1.5 max|h(v)| + 2
  std::uint64_t seed = 0;
};

double default_clip_box(const TropicalCurve& curve);

/// Euclidean distance from x to the polyhedral curve (segments and rays).
double distance_to_curve(const TropicalCurve& curve, const double* x);

/// Points of the curve inside the box ||x||_inf <= box, spaced by `step`.
PointCloud sample_tropical_curve(const TropicalCurve& curve, double box, double step);

/// Log-moduli window covering the part of the vertex fibre inside the box.
LogWindow vertex_window(const VertexModel& model, double theta_hat, double box_unscaled);

/// Rescaled lifted samples of all vertex curves, each clipped at the
/// midpoints of its internal edges and to the box.
PointCloud rescaled_cloud(const MatchingDatum& datum, int resolution, double box);

ConvergenceTable convergence_test(const TropicalCurve& curve, const KahlerData& kahler,
                                  const std::vector<double>& free_phases, const std::vector<double>& T_list,
                                  const ConvergenceOptions& options);

}  // namespace tsl
