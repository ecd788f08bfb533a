#include "helpers.hpp"

#include "tsl/vertex_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace tsl;

namespace {

std::vector<Exponent> sorted_vertices(const NewtonPolygon& p) {
  auto v = p.vertices;
  std::sort(v.begin(), v.end());
  return v;
}

// Angles with sum = N pi mod 2pi, one list per facet.
std::vector<std::vector<double>> balanced_phases(const NewtonPolygon& p, std::mt19937_64& rng) {
  std::vector<std::vector<double>> out;
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& f : p.facets) {
    std::vector<double> ph;
    for (long k = 0; k < f.length; ++k) {
      ph.push_back(2.0 * std::numbers::pi * unit_uniform(rng));
      total += ph.back();
      ++n;
    }
    out.push_back(ph);
  }
  out.back().back() = wrap_angle(out.back().back() - total + static_cast<double>(n) * std::numbers::pi);
  return out;
}

}  // namespace

TEST_CASE("pants fan gives the standard triangle") {
  const NewtonPolygon p = polygon_from_fan({{-1, 0}, {0, 1}, {1, -1}});
  CHECK(sorted_vertices(p) == std::vector<Exponent>{{0, 0}, {0, 1}, {1, 1}});
  CHECK(p.facets.size() == 3);
  CHECK(p.interior_points().empty());
  CHECK(p.boundary_points().size() == 3);
  for (const auto& f : p.facets) CHECK(f.length == 1);
}

TEST_CASE("four-valent fan gives the unit square") {
  const NewtonPolygon p = polygon_from_fan({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  CHECK(sorted_vertices(p) == std::vector<Exponent>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(p.vertices.front() == Exponent{0, 0});
}

TEST_CASE("multiplicities become facet lengths") {
  const NewtonPolygon p = polygon_from_fan({{-1, 0}, {-1, 0}, {0, 1}, {0, 1}, {1, -1}, {1, -1}});
  CHECK(p.facets.size() == 3);
  for (const auto& f : p.facets) CHECK(f.length == 2);
  CHECK(p.boundary_points().size() == 6);
  CHECK(p.interior_points().empty());
  REQUIRE(p.facet_with_normal({0, 1}).has_value());
  CHECK_FALSE(p.facet_with_normal({1, 1}).has_value());
}

TEST_CASE("facet steps are quarter turns of the normals") {
  const NewtonPolygon p = polygon_from_fan({{2, -1}, {-1, 2}, {-1, -1}});
  for (const auto& f : p.facets) CHECK(f.step == quarter_turn(f.normal));
  CHECK(p.interior_points().size() == 1);
}

TEST_CASE("fans that are not dual to a polygon are rejected") {
  CHECK(testing::code_of([] { polygon_from_fan({{1, 0}, {0, 1}, {-1, 0}}); }) == ErrorCode::Unbalanced);
  CHECK(testing::code_of([] { polygon_from_fan({{1, 0}, {-1, 0}}); }) == ErrorCode::RankMismatch);
}

TEST_CASE("Vieta products of a split quadratic") {
  // z^2 - 1: roots +-1, product -1 = (-1)^2 a_0 / a_2
  const auto roots = polynomial_roots(UniPoly{{-1.0, 0.0, 1.0}});
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] * roots[1] - Complex(-1.0)) < 1e-14);
  CHECK(std::abs(std::abs(roots[0]) - 1.0) < 1e-14);
}

TEST_CASE("phase balance arithmetic") {
  const double h = std::numbers::pi / 2;
  CHECK(std::abs(phase_sum_check({{h}, {h}, {h}, {h}})) < 1e-12);
  CHECK(std::abs(phase_sum_check({{0.3}, {0.5}, {3 * std::numbers::pi - 0.8}})) < 1e-12);
  CHECK(std::abs(phase_sum_check({{0.3}, {0.5}, {0.7}})) > 0.1);
}

TEST_CASE("well-centred polynomials put facet roots on the unit circle") {
  std::mt19937_64 rng(5);
  const std::vector<std::vector<Vec2>> fans{{{-1, 0}, {0, 1}, {1, -1}},
                                            {{1, 0}, {-1, 0}, {0, 1}, {0, -1}},
                                            {{-1, 0}, {-1, 0}, {0, 1}, {0, 1}, {1, -1}, {1, -1}},
                                            {{2, -1}, {-1, 2}, {-1, -1}}};
  for (const auto& fan : fans) {
    const NewtonPolygon p = polygon_from_fan(fan);
    for (int trial = 0; trial < 20; ++trial) {
      const auto phases = balanced_phases(p, rng);
      InteriorCoefficients ic;
      if (!p.interior_points().empty()) ic.seed = 77 + trial;
      const LaurentPoly f = well_centred_poly(p, phases, ic);
      for (const auto& v : p.vertices) CHECK(std::abs(std::abs(f.coeffs.at(v)) - 1.0) < 1e-12);
      for (std::size_t k = 0; k < p.facets.size(); ++k) {
        const FacetRoots r = facet_roots(f, p, k);
        CHECK(r.vieta_residual < 1e-9);
        for (const auto& z : r.roots) CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
        // the roots carry the prescribed angles
        std::vector<double> want = phases[k], got;
        for (const auto& z : r.roots) got.push_back(wrap_angle(std::arg(z)));
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(wrap_signed(got[i] - want[i])) < 1e-9);
      }
      CHECK(std::abs(phase_sum_check(phases)) < 1e-9);
    }
  }
}

TEST_CASE("unbalanced phases do not close the boundary cycle") {
  const NewtonPolygon p = polygon_from_fan({{-1, 0}, {0, 1}, {1, -1}});
  CHECK(testing::code_of([&] { well_centred_poly(p, {{0.3}, {0.5}, {0.7}}); }) == ErrorCode::PhaseInconsistent);
}

TEST_CASE("coincident phases on a facet collide") {
  const NewtonPolygon p = polygon_from_fan({{-1, 0}, {-1, 0}, {0, 1}, {0, 1}, {1, -1}, {1, -1}});
  const double pi = std::numbers::pi;
  // six phases summing to 6 pi = 0 mod 2 pi, the first facet doubled
  CHECK(testing::code_of([&] { well_centred_poly(p, {{1.0, 1.0}, {0.5, 1.5}, {pi, -4.0 - pi}}); }) ==
        ErrorCode::RootCollision);
}

TEST_CASE("smoothness of simple curves") {
  LaurentPoly line;
  line.coeffs[{1, 0}] = 1.0;
  line.coeffs[{0, 1}] = 1.0;
  line.coeffs[{0, 0}] = -1.0;
  CHECK(check_smooth(line).smooth);

  // (z1 - 1)(z2 - 1) has a node at (1, 1)
  LaurentPoly node;
  node.coeffs[{1, 1}] = 1.0;
  node.coeffs[{1, 0}] = -1.0;
  node.coeffs[{0, 1}] = -1.0;
  node.coeffs[{0, 0}] = 1.0;
  const SmoothnessResult r = check_smooth(node);
  CHECK_FALSE(r.smooth);
  REQUIRE(r.witness.has_value());
  CHECK(std::abs((*r.witness)[0] - Complex(1.0)) < 1e-6);
  CHECK(std::abs((*r.witness)[1] - Complex(1.0)) < 1e-6);
}

TEST_CASE("random well-centred pants are smooth") {
  std::mt19937_64 rng(9);
  const NewtonPolygon p = polygon_from_fan({{-1, 0}, {0, 1}, {1, -1}});
  for (int trial = 0; trial < 10; ++trial) CHECK(check_smooth(well_centred_poly(p, balanced_phases(p, rng))).smooth);
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
  CHECK(wrap_signed(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_signed(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
}
