#pragma once

#include "tsl/error.hpp"
#include "tsl/tropical_curve.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

inline std::string fixture_text(const std::string& name) {
  std::ifstream in(std::string(TSL_FIXTURE_DIR) + "/" + name);
  REQUIRE_MESSAGE(in.good(), "missing fixture " << name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline tsl::TropicalCurve fixture(const std::string& name) { return tsl::parse_curve(fixture_text(name)); }

inline tsl::IntVec iv(std::initializer_list<long> xs) {
  tsl::IntVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

/// Fixtures that pass both validators.
inline const std::vector<std::string>& valid_fixtures() {
  static const std::vector<std::string> names{"pants.json",          "two_vertex.json",    "triangle_cycle.json",
                                              "square_4valent.json", "doubled_pants.json", "r3_two_vertex.json",
                                              "index2_saturation.json"};
  return names;
}

template <class F>
tsl::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const tsl::Error& e) {
    return e.code();
  }
  FAIL("expected a tsl::Error");
  return tsl::ErrorCode::IoError;
}

}  // namespace testing
