#pragma once

// Per-vertex local models: the Newton polygon dual to a balanced planar fan,
// facet polynomials and their roots, and well-centred Laurent polynomials
// whose facet roots sit on the unit circle at prescribed angles.

#include "tsl/polynomial.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsl {

using Vec2 = std::array<long, 2>;

/// Counterclockwise rotation by a quarter turn, (x, y) -> (-y, x).
constexpr Vec2 quarter_turn(const Vec2& v) { return {-v[1], v[0]}; }

struct Facet {
  Vec2 normal;      // outward primitive normal n_F
  long length = 0;  // lattice length l
  Exponent start;   // m_0
  Vec2 step;        // m_F, counterclockwise along the boundary

  Exponent point(long k) const { return {start[0] + k * step[0], start[1] + k * step[1]}; }
  Exponent end() const { return point(length); }
  std::vector<Exponent> lattice_points() const;
};

/// Convex lattice polygon, vertices counterclockwise starting at the
/// lexicographically least vertex, which sits at the origin. Facet k runs
/// from vertices[k] to vertices[k+1].
struct NewtonPolygon {
  std::vector<Exponent> vertices;
  std::vector<Facet> facets;

  std::vector<Exponent> boundary_points() const;
  std::vector<Exponent> interior_points() const;
  /// Index of the facet with the given outward normal, if any.
  std::optional<std::size_t> facet_with_normal(const Vec2& n) const;
};

/// Polygon whose normal fan is the given multiset of outward normals: each
/// distinct direction becomes a facet whose lattice length is its
/// multiplicity. Throws Unbalanced if the normals do not sum to zero.
NewtonPolygon polygon_from_fan(const std::vector<Vec2>& normals);

/// Coefficients of f read along facet lattice points m_0, m_0+m_F, ...
UniPoly facet_polynomial(const LaurentPoly& poly, const NewtonPolygon& polygon, std::size_t facet);

struct FacetRoots {
  std::size_t facet = 0;
  std::vector<Complex> roots;
  /// |prod roots - (-1)^l a_{m_0}/a_{m_l}| relative to the ratio's modulus.
  double vieta_residual = 0.0;
  double min_separation = 0.0;
};

inline constexpr double kRootTolerance = 1e-8;

/// Roots of the facet polynomial. Throws RootCollision when two roots are
/// closer than tol (relative to the largest root modulus).
FacetRoots facet_roots(const LaurentPoly& poly, const NewtonPolygon& polygon, std::size_t facet,
                       double tol = kRootTolerance);

/// (sum of all phases - N pi) reduced to (-pi, pi], N the number of phases.
double phase_sum_check(const std::vector<std::vector<double>>& facet_phases);

struct InteriorCoefficients {
  /// Without a seed interior coefficients are zero.
  std::optional<std::uint64_t> seed;
  double max_modulus = 0.1;
};

/// Builds the well-centred polynomial with unit modulus at polygon vertices.
/// facet_phases[k] lists the root angles of facet k. Throws
/// PhaseInconsistent when the boundary cycle does not close and
/// RootCollision when a facet's roots coincide.
LaurentPoly well_centred_poly(const NewtonPolygon& polygon, const std::vector<std::vector<double>>& facet_phases,
                              const InteriorCoefficients& interior = {});

struct SmoothnessResult {
  bool smooth = true;
  std::optional<std::array<Complex, 2>> witness;
  /// Smallest relative gradient found at a candidate point on the curve.
  double min_relative_gradient = 0.0;
  std::string method;
};

struct SmoothnessOptions {
  int exact_max_degree = 8;
  int multistart_count = 1000;
  std::uint64_t seed = 1;
  double singular_tol = 1e-7;
  double smooth_tol = 1e-5;
};

/// Decides whether Zero(f) is smooth in (C*)^2. Uses a 50-digit resultant
/// for total degree <= exact_max_degree and seeded multi-start Newton above
/// that. Throws Inconclusive when neither outcome can be certified.
SmoothnessResult check_smooth(const LaurentPoly& poly, const SmoothnessOptions& options = {});

/// Wraps an angle to [0, 2pi).
double wrap_angle(double a);
/// Wraps an angle to (-pi, pi].
double wrap_signed(double a);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit generator.
template <class Rng>
double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tsl
