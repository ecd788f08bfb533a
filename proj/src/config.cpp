#include "tsl/config.hpp"

#include "tsl/error.hpp"
#include "tsl/phase_solver.hpp"

#include <json.hpp>

#include <cmath>

namespace tsl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

std::uint64_t as_seed(const json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(what + " must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

Rational as_rational(const json& j) {
  if (j.is_number_integer()) return Rational(BigInt(j.get<long long>()));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      fail(std::string("bad metric entry: ") + e.what());
    }
  }
  fail("metric entries must be integers or \"p/q\" strings");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object()) fail("config must be an object");
  if (!doc.contains("schema") || doc.at("schema") != 1) fail("config needs \"schema\": 1");

  static const char* known[] = {"schema", "kahler", "T_list", "free_phases", "seed", "clip_box",
                                "window", "resolution", "tolerances", "out"};
  for (const auto& [key, _] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail("unknown config field '" + key + "'");
  }

  RunConfig cfg;
  if (doc.contains("kahler")) {
    const json& k = doc.at("kahler");
    if (!k.is_object() || !k.contains("g") || !k.at("g").is_array()) fail("kahler needs a metric 'g'");
    KahlerData kd;
    for (const auto& row : k.at("g")) {
      if (!row.is_array()) fail("metric rows must be arrays");
      RatVec r;
      for (const auto& x : row) r.push_back(as_rational(x));
      kd.g.push_back(std::move(r));
    }
    if (k.contains("theta_hat")) kd.theta_hat = as_number(k.at("theta_hat"), "theta_hat");
    try {
      validate_kahler(kd);
    } catch (const Error& e) {
      fail(e.what());
    }
    cfg.kahler = std::move(kd);
  }
  if (doc.contains("T_list")) {
    const json& t = doc.at("T_list");
    if (!t.is_array()) fail("T_list must be an array");
    cfg.T_list.clear();
    for (const auto& x : t) cfg.T_list.push_back(as_number(x, "T_list entry"));
  }
  if (doc.contains("free_phases")) {
    const json& f = doc.at("free_phases");
    if (f.is_string()) {
      const std::string s = f.get<std::string>();
      if (s.rfind("seed:", 0) != 0) fail("free_phases string must be \"seed:N\"");
      try {
        std::size_t used = 0;
        cfg.free_phase_seed = std::stoull(s.substr(5), &used);
        if (used != s.size() - 5) fail("free_phases seed is not an integer");
      } catch (const std::logic_error&) {
        fail("free_phases seed is not an integer");
      }
    } else if (f.is_array()) {
      std::vector<double> v;
      for (const auto& x : f) v.push_back(as_number(x, "free phase"));
      cfg.free_phases = std::move(v);
    } else {
      fail("free_phases must be an array of angles or \"seed:N\"");
    }
  }
  if (doc.contains("seed")) cfg.seed = as_seed(doc.at("seed"), "seed");
  if (doc.contains("clip_box") && doc.contains("window")) fail("give only one of clip_box and window");
  for (const char* key : {"clip_box", "window"})
    if (doc.contains(key) && !doc.at(key).is_null()) cfg.clip_box = as_number(doc.at(key), key);
  if (doc.contains("resolution")) {
    const json& r = doc.at("resolution");
    if (!r.is_number_integer()) fail("resolution must be an integer");
    cfg.resolution = r.get<int>();
  }
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) fail("tolerances must be an object");
    for (const auto& [key, val] : t.items()) {
      if (key == "parametrix") cfg.tolerances.parametrix = as_number(val, key);
      else if (key == "h_grid") cfg.tolerances.h_grid = as_number(val, key);
      else if (key == "delta") cfg.tolerances.delta = as_number(val, key);
      else fail("unknown tolerance '" + key + "'");
    }
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) fail("out must be a string");
    cfg.out = doc.at("out").get<std::string>();
  }
  return cfg;
}

void finalize_config(RunConfig& cfg, const TropicalCurve& curve) {
  if (!cfg.kahler) cfg.kahler = euclidean_kahler(curve.dimension, 1.5707963267948966);
  if (cfg.kahler->dimension() != curve.dimension) fail("metric dimension differs from the curve");
  if (!(cfg.kahler->theta_hat > 0.0 && cfg.kahler->theta_hat < 3.141592653589793)) fail("theta_hat must lie in (0, pi)");
  if (cfg.T_list.empty()) fail("T_list must be nonempty");
  for (std::size_t i = 0; i < cfg.T_list.size(); ++i) {
    if (!(cfg.T_list[i] > 0.0) || !std::isfinite(cfg.T_list[i])) fail("T values must be positive");
    if (i > 0 && !(cfg.T_list[i] > cfg.T_list[i - 1])) fail("T_list must be strictly increasing");
  }
  if (cfg.resolution < 16) fail("resolution must be at least 16");
  if (cfg.clip_box && !(*cfg.clip_box > 0.0)) fail("clip_box must be positive");
  if (!(cfg.tolerances.parametrix > 0.0) || !(cfg.tolerances.h_grid > 0.0)) fail("tolerances must be positive");
  if (!cfg.seed) fail("a seed is required (config field 'seed' or --seed)");
  if (cfg.free_phases && cfg.free_phases->size() != moduli_dimension(curve))
    fail("expected " + std::to_string(moduli_dimension(curve)) + " free phases, got " +
         std::to_string(cfg.free_phases->size()));
}

std::vector<double> resolve_free_phases(const RunConfig& cfg, const TropicalCurve& curve) {
  if (cfg.free_phases) return *cfg.free_phases;
  return random_free_values(curve, cfg.free_phase_seed ? *cfg.free_phase_seed : cfg.seed.value_or(0));
}

}  // namespace tsl
