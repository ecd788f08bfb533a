#pragma once

#include "tsl/lattice.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsl {

/// An edge of a tropical curve. `direction` is primitive and points away
/// from `from`; external edges have no `to` vertex.
struct Edge {
  std::string id;
  std::string from;
  std::optional<std::string> to;
  IntVec direction;

  bool external() const { return !to.has_value(); }

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Combinatorial graph plus affine embedding with exact rational vertex
/// positions. Edges are kept sorted by id; edge weights are always one.
struct TropicalCurve {
  std::size_t dimension = 0;
  std::map<std::string, RatVec> vertices;
  std::vector<Edge> edges;

  const Edge& edge(const std::string& id) const;
  const RatVec& position(const std::string& vertex) const;
  std::vector<std::string> vertex_ids() const;
  std::size_t internal_edge_count() const;

  /// Edges touching `vertex`, with each internal edge listed once per
  /// incident endpoint.
  std::vector<const Edge*> incident(const std::string& vertex) const;

  friend bool operator==(const TropicalCurve&, const TropicalCurve&) = default;
};

/// Primitive direction of `e` pointing away from `vertex`.
IntVec outward_direction(const Edge& e, const std::string& vertex);

/// The star of a vertex: a single point with one ray per incident edge.
struct LocalFan {
  RatVec center;
  std::vector<IntVec> rays;
  std::vector<std::string> edge_ids;
};

struct ValidationReport {
  std::map<std::string, bool> balanced;
  std::map<std::string, bool> locally_planar;
  std::vector<std::string> messages;

  bool passed() const;
  void merge(const ValidationReport& other);
};

/// Parses the JSON curve document. Throws SyntaxError, SchemaError or
/// GeometryError.
TropicalCurve parse_curve(const std::string& text);
std::string serialize_curve(const TropicalCurve& curve);

ValidationReport validate_balancing(const TropicalCurve& curve);
ValidationReport validate_locally_planar(const TropicalCurve& curve);
bool is_balanced(const LocalFan& fan);
IntVec balancing_deficit(const std::vector<IntVec>& rays);

LocalFan localize(const TropicalCurve& curve, const std::string& vertex);

/// Length of h(e) measured with the base metric g; +inf for external edges.
std::map<std::string, double> edge_lengths(const TropicalCurve& curve,
                                           const std::vector<RatVec>& metric);
std::map<std::string, double> edge_lengths(const TropicalCurve& curve);

Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);
double to_double(const Rational& q);
std::vector<RatVec> identity_metric(std::size_t n);

}  // namespace tsl
