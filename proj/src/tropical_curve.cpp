#include "tsl/tropical_curve.hpp"

#include "tsl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tsl {

using nlohmann::json;

const Edge& TropicalCurve::edge(const std::string& id) const {
  for (const auto& e : edges)
    if (e.id == id) return e;
  throw Error(ErrorCode::SchemaError, "unknown edge '" + id + "'");
}

const RatVec& TropicalCurve::position(const std::string& vertex) const {
  auto it = vertices.find(vertex);
  if (it == vertices.end()) throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + vertex + "'");
  return it->second;
}

std::vector<std::string> TropicalCurve::vertex_ids() const {
  std::vector<std::string> ids;
  ids.reserve(vertices.size());
  for (const auto& [id, _] : vertices) ids.push_back(id);
  return ids;
}

std::size_t TropicalCurve::internal_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return !e.external(); }));
}

std::vector<const Edge*> TropicalCurve::incident(const std::string& vertex) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges) {
    if (e.from == vertex) out.push_back(&e);
    if (e.to && *e.to == vertex) out.push_back(&e);
  }
  return out;
}

IntVec outward_direction(const Edge& e, const std::string& vertex) {
  if (e.from == vertex) return e.direction;
  if (e.to && *e.to == vertex) return negated(e.direction);
  throw Error(ErrorCode::UnknownVertex, "edge '" + e.id + "' is not incident to '" + vertex + "'");
}

bool ValidationReport::passed() const {
  auto all = [](const std::map<std::string, bool>& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second; });
  };
  return all(balanced) && all(locally_planar);
}

void ValidationReport::merge(const ValidationReport& other) {
  for (const auto& [k, v] : other.balanced) balanced[k] = v;
  for (const auto& [k, v] : other.locally_planar) locally_planar[k] = v;
  messages.insert(messages.end(), other.messages.begin(), other.messages.end());
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt p(text.substr(0, slash));
    const BigInt q(text.substr(slash + 1));
    if (q == 0) throw Error(ErrorCode::SchemaError, "zero denominator in '" + text + "'");
    return Rational(p, q);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::SchemaError, "not a rational number: '" + text + "'");
  }
}

std::string format_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::vector<RatVec> identity_metric(std::size_t n) {
  std::vector<RatVec> g(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i) g[i][i] = 1;
  return g;
}

namespace {

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(j.get<long long>()));
  throw Error(ErrorCode::SchemaError, "coordinates must be integers or \"p/q\" strings");
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorCode::SchemaError, std::string("missing field '") + key + "'");
  return obj.at(key);
}

// Positive rational lambda with d = lambda * dir, if it exists.
std::optional<Rational> positive_multiple(const RatVec& d, const IntVec& dir) {
  std::optional<Rational> lambda;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (dir[i] == 0) {
      if (d[i] != 0) return std::nullopt;
      continue;
    }
    const Rational l = d[i] / Rational(dir[i]);
    if (lambda && *lambda != l) return std::nullopt;
    lambda = l;
  }
  if (!lambda || *lambda <= 0) return std::nullopt;
  return lambda;
}

void check_connected(const TropicalCurve& c) {
  if (c.vertices.empty()) throw Error(ErrorCode::SchemaError, "curve has no vertices");
  std::set<std::string> seen{c.vertices.begin()->first};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : c.edges) {
      if (!e.to) continue;
      const bool a = seen.count(e.from) > 0;
      const bool b = seen.count(*e.to) > 0;
      if (a != b) {
        seen.insert(e.from);
        seen.insert(*e.to);
        grew = true;
      }
    }
  }
  if (seen.size() != c.vertices.size()) throw Error(ErrorCode::GeometryError, "curve graph is not connected");
}

}  // namespace

TropicalCurve parse_curve(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "curve document must be an object");

  TropicalCurve curve;
  const json& dim = require(doc, "dimension");
  if (!dim.is_number_integer() || dim.get<long long>() < 2) throw Error(ErrorCode::SchemaError, "dimension must be an integer >= 2");
  curve.dimension = dim.get<std::size_t>();

  const json& verts = require(doc, "vertices");
  if (!verts.is_object() || verts.empty()) throw Error(ErrorCode::SchemaError, "vertices must be a non-empty object");
  for (const auto& [id, coords] : verts.items()) {
    if (!coords.is_array() || coords.size() != curve.dimension)
      throw Error(ErrorCode::SchemaError, "vertex '" + id + "' must have " + std::to_string(curve.dimension) + " coordinates");
    RatVec p;
    for (const auto& c : coords) p.push_back(rational_from_json(c));
    curve.vertices.emplace(id, std::move(p));
  }

  const json& edges = require(doc, "edges");
  if (!edges.is_array()) throw Error(ErrorCode::SchemaError, "edges must be an array");
  std::set<std::string> ids;
  for (const auto& je : edges) {
    Edge e;
    const json& id = require(je, "id");
    const json& from = require(je, "from");
    const json& to = require(je, "to");
    const json& dir = require(je, "direction");
    if (!id.is_string() || !from.is_string() || !to.is_string()) throw Error(ErrorCode::SchemaError, "edge id/from/to must be strings");
    e.id = id.get<std::string>();
    if (!ids.insert(e.id).second) throw Error(ErrorCode::SchemaError, "duplicate edge id '" + e.id + "'");
    e.from = from.get<std::string>();
    if (!curve.vertices.count(e.from)) throw Error(ErrorCode::SchemaError, "edge '" + e.id + "' starts at unknown vertex '" + e.from + "'");
    if (to.get<std::string>() != "INF") {
      e.to = to.get<std::string>();
      if (!curve.vertices.count(*e.to)) throw Error(ErrorCode::SchemaError, "edge '" + e.id + "' ends at unknown vertex '" + *e.to + "'");
    }
    if (!dir.is_array() || dir.size() != curve.dimension)
      throw Error(ErrorCode::SchemaError, "edge '" + e.id + "' direction must have " + std::to_string(curve.dimension) + " entries");
    IntVec raw;
    for (const auto& x : dir) {
      if (x.is_number_integer()) raw.emplace_back(x.get<long long>());
      else if (x.is_string()) raw.emplace_back(BigInt(x.get<std::string>()));
      else throw Error(ErrorCode::SchemaError, "edge '" + e.id + "' direction entries must be integers");
    }
    if (is_zero(raw)) throw Error(ErrorCode::GeometryError, "edge '" + e.id + "' has zero direction");
    e.direction = primitive(raw);

    if (e.to) {
      if (*e.to == e.from) throw Error(ErrorCode::GeometryError, "edge '" + e.id + "' is a loop");
      const RatVec& a = curve.vertices.at(e.from);
      const RatVec& b = curve.vertices.at(*e.to);
      RatVec d(curve.dimension);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = b[i] - a[i];
      if (!positive_multiple(d, e.direction))
        throw Error(ErrorCode::GeometryError,
                    "edge '" + e.id + "' displacement is not a positive multiple of its direction");
    }
    curve.edges.push_back(std::move(e));
  }
  std::sort(curve.edges.begin(), curve.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  check_connected(curve);
  return curve;
}

std::string serialize_curve(const TropicalCurve& curve) {
  json doc;
  doc["dimension"] = curve.dimension;
  json verts = json::object();
  for (const auto& [id, p] : curve.vertices) {
    json coords = json::array();
    for (const auto& q : p) coords.push_back(format_rational(q));
    verts[id] = coords;
  }
  doc["vertices"] = verts;
  json edges = json::array();
  for (const auto& e : curve.edges) {
    json je;
    je["id"] = e.id;
    je["from"] = e.from;
    je["to"] = e.to ? *e.to : std::string("INF");
    json dir = json::array();
    for (const auto& x : e.direction) dir.push_back(x.convert_to<long long>());
    je["direction"] = dir;
    edges.push_back(je);
  }
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

IntVec balancing_deficit(const std::vector<IntVec>& rays) {
  if (rays.empty()) return {};
  IntVec sum(rays.front().size());
  for (const auto& r : rays) sum = add(sum, r);
  return sum;
}

bool is_balanced(const LocalFan& fan) { return is_zero(balancing_deficit(fan.rays)); }

ValidationReport validate_balancing(const TropicalCurve& curve) {
  ValidationReport report;
  for (const auto& v : curve.vertex_ids()) {
    const LocalFan fan = localize(curve, v);
    const IntVec deficit = balancing_deficit(fan.rays);
    const bool ok = fan.rays.empty() ? false : is_zero(deficit);
    report.balanced[v] = ok;
    if (!ok) {
      std::string msg = "vertex " + v + " unbalanced, deficit (";
      for (std::size_t i = 0; i < deficit.size(); ++i) msg += (i ? "," : "") + deficit[i].str();
      report.messages.push_back(msg + ")");
    }
  }
  return report;
}

ValidationReport validate_locally_planar(const TropicalCurve& curve) {
  ValidationReport report;
  for (const auto& v : curve.vertex_ids()) {
    const LocalFan fan = localize(curve, v);
    const std::size_t valency = fan.rays.size();
    const std::size_t r = rank(fan.rays);
    const bool ok = valency >= 3 && r == 2;
    report.locally_planar[v] = ok;
    if (!ok)
      report.messages.push_back("vertex " + v + " not locally planar (valency " + std::to_string(valency) + ", rank " +
                                std::to_string(r) + ")");
  }
  return report;
}

LocalFan localize(const TropicalCurve& curve, const std::string& vertex) {
  LocalFan fan;
  fan.center = curve.position(vertex);
  for (const Edge* e : curve.incident(vertex)) {
    fan.rays.push_back(outward_direction(*e, vertex));
    fan.edge_ids.push_back(e->id);
  }
  return fan;
}

std::map<std::string, double> edge_lengths(const TropicalCurve& curve, const std::vector<RatVec>& metric) {
  std::map<std::string, double> out;
  for (const auto& e : curve.edges) {
    if (e.external()) {
      out[e.id] = std::numeric_limits<double>::infinity();
      continue;
    }
    const RatVec& a = curve.position(e.from);
    const RatVec& b = curve.position(*e.to);
    Rational q = 0;
    for (std::size_t i = 0; i < curve.dimension; ++i)
      for (std::size_t j = 0; j < curve.dimension; ++j) q += (b[i] - a[i]) * metric[i][j] * (b[j] - a[j]);
    out[e.id] = std::sqrt(to_double(q));
  }
  return out;
}

std::map<std::string, double> edge_lengths(const TropicalCurve& curve) {
  return edge_lengths(curve, identity_metric(curve.dimension));
}

}  // namespace tsl
