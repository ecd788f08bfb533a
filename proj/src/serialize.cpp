#include "tsl/serialize.hpp"

#include "tsl/error.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace tsl {

namespace {

json bigint_to_json(const BigInt& x) {
  static const BigInt limit = BigInt(1) << 53;
  if (abs(x) < limit) return x.convert_to<long long>();
  return x.str();
}

json intvec_to_json(const IntVec& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(bigint_to_json(x));
  return out;
}

json doubles_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw Error(ErrorCode::SchemaError, std::string("expected number '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json laurent_to_json(const LaurentPoly& p) {
  json out = json::array();
  for (const auto& [m, c] : p.coeffs) out.push_back({{"m", {m[0], m[1]}}, {"re", c.real()}, {"im", c.imag()}});
  return out;
}

LaurentPoly laurent_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "Laurent polynomial must be an array of terms");
  LaurentPoly p;
  for (const auto& term : j) {
    if (!term.is_object() || !term.contains("m") || !term.at("m").is_array() || term.at("m").size() != 2)
      throw Error(ErrorCode::SchemaError, "term needs an exponent pair 'm'");
    const Exponent m{term.at("m")[0].get<long>(), term.at("m")[1].get<long>()};
    if (p.coeffs.count(m)) throw Error(ErrorCode::SchemaError, "duplicate exponent in polynomial");
    p.coeffs[m] = Complex(number_at(term, "re"), number_at(term, "im"));
  }
  return p;
}

json phases_to_json(const PhaseAssignment& a) {
  json theta = json::object();
  for (const auto& [e, t] : a.theta) theta[e] = t;
  json free = json::array();
  for (const auto& [e, t] : a.free_params) free.push_back({e, t});
  return {{"theta", theta}, {"free", free}};
}

PhaseAssignment phases_from_json(const json& j) {
  if (!j.is_object() || !j.contains("theta") || !j.at("theta").is_object())
    throw Error(ErrorCode::SchemaError, "phase assignment needs a 'theta' object");
  PhaseAssignment a;
  for (const auto& [e, t] : j.at("theta").items()) {
    if (!t.is_number()) throw Error(ErrorCode::SchemaError, "phase of edge '" + e + "' must be a number");
    a.theta[e] = t.get<double>();
  }
  if (j.contains("free")) {
    for (const auto& p : j.at("free")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_number())
        throw Error(ErrorCode::SchemaError, "free parameters are [edge, value] pairs");
      a.free_params.emplace_back(p[0].get<std::string>(), p[1].get<double>());
    }
  }
  return a;
}

json matrix_to_json(const IntMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(intvec_to_json(m.row(r)));
  return out;
}

json datum_to_json(const MatchingDatum& d) {
  json doc;
  doc["curve"] = json::parse(serialize_curve(d.curve));
  json g = json::array();
  for (const auto& row : d.kahler.g) {
    json r = json::array();
    for (const auto& q : row) r.push_back(format_rational(q));
    g.push_back(r);
  }
  doc["kahler"] = {{"g", g}, {"theta_hat", d.kahler.theta_hat}};
  doc["T"] = d.T;
  doc["seed"] = d.seed;
  doc["phases"] = phases_to_json(d.phases);
  doc["genericity_attempts"] = d.genericity_attempts;
  doc["warnings"] = d.warnings;

  json verts = json::array();
  for (const auto& vm : d.vertices) {
    const auto& sk = vm.skeleton;
    json rays = json::array();
    for (const auto& r : sk.rays) rays.push_back({r[0], r[1]});
    json polygon = json::array();
    for (const auto& p : sk.polygon.vertices) polygon.push_back({p[0], p[1]});
    verts.push_back({{"vertex", sk.vertex},
                     {"frame", matrix_to_json(sk.frame.matrix)},
                     {"edges", sk.edge_ids},
                     {"rays", rays},
                     {"newton_polygon", polygon},
                     {"facet_edges", sk.facet_edges},
                     {"reduced_metric",
                      {{vm.reduced.g2(0, 0), vm.reduced.g2(0, 1)}, {vm.reduced.g2(1, 0), vm.reduced.g2(1, 1)}}},
                     {"polynomial", laurent_to_json(vm.poly)},
                     {"shift", {vm.shift[0], vm.shift[1]}},
                     {"p_v", doubles_to_json(vm.p_v)}});
  }
  doc["vertices"] = verts;

  json cyls = json::array();
  for (const auto& c : d.cylinders)
    cyls.push_back({{"edge", c.edge},
                    {"direction", intvec_to_json(c.direction)},
                    {"base_point", doubles_to_json(c.base_point)},
                    {"phase_const", c.phase_const},
                    {"length", number_or_null(c.length)}});
  doc["cylinders"] = cyls;

  json halves = json::array();
  for (const auto& h : d.halves)
    halves.push_back({{"vertex", h.vertex},
                      {"edge", h.edge},
                      {"direction", intvec_to_json(h.direction)},
                      {"base_point", doubles_to_json(h.base_point)},
                      {"root", {h.root.real(), h.root.imag()}}});
  doc["halves"] = halves;
  return doc;
}

json diagnostics_to_json(const ParametrixDiagnostics& d) {
  return {{"l_min", number_or_null(d.l_min)},
          {"l_max", number_or_null(d.l_max)},
          {"contraction_ratio", d.contraction_ratio},
          {"ratios", doubles_to_json(d.ratios)},
          {"iterations", d.iterations},
          {"residual", d.residual},
          {"beta1_norm", d.beta1_norm},
          {"beta1_weighted_norm", d.beta1_weighted_norm},
          {"c_v_values", doubles_to_json(d.c_v_values)},
          {"obstruction_residual", d.obstruction_residual}};
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t) {
  os << "T,d_hausdorff\n" << std::setprecision(17);
  for (const auto& r : t.rows) os << r.T << "," << r.d_hausdorff << "\n";
}

json convergence_to_json(const ConvergenceTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"T", r.T}, {"d_hausdorff", r.d_hausdorff}, {"points", r.points}});
  return {{"rows", rows}, {"fitted_rate", t.fitted_rate}, {"clip_box", t.clip_box}};
}

json cloud_to_json(const PointCloud& c) {
  json pts = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) pts.push_back(std::vector<double>(c.point(i), c.point(i) + c.dim));
  return {{"dim", c.dim}, {"points", pts}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace tsl
