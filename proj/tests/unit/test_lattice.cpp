#include "helpers.hpp"

#include "tsl/lattice.hpp"

#include <random>

using namespace tsl;
using testing::iv;

TEST_CASE("primitive divides out the gcd") {
  CHECK(primitive(iv({6, -9, 3})) == iv({2, -3, 1}));
  CHECK(primitive(iv({0, -4})) == iv({0, -1}));
  CHECK(testing::code_of([] { primitive(iv({0, 0, 0})); }) == ErrorCode::ZeroVector);
}

TEST_CASE("saturation of an index-2 sublattice") {
  const auto [b1, b2] = saturated_rank2_basis({iv({2, 0}), iv({0, 2})});
  CHECK(b1 == iv({1, 0}));
  CHECK(b2 == iv({0, 1}));
}

TEST_CASE("saturation of a diagonal sublattice in Z^3") {
  const auto [b1, b2] = saturated_rank2_basis({iv({1, 1, 0}), iv({-1, 1, 0})});
  // span_Q is the plane z = 0, whose integer points are all of Z^2 x {0}
  IntMatrix m = IntMatrix::from_rows({b1, b2, iv({0, 0, 1})});
  CHECK(abs(determinant(m)) == 1);
}

TEST_CASE("rank mismatches are rejected") {
  CHECK(testing::code_of([] { saturated_rank2_basis({iv({1, 0, 0}), iv({2, 0, 0})}); }) == ErrorCode::RankMismatch);
  CHECK(testing::code_of([] { saturated_rank2_basis({iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})}); }) ==
        ErrorCode::RankMismatch);
}

TEST_CASE("unimodular completion maps the basis to e1, e2") {
  const std::pair<IntVec, IntVec> basis{iv({1, 2, 3}), iv({0, 1, 1})};
  const UnimodularFrame f = complete_to_unimodular(basis);
  CHECK(f.matrix * basis.first == iv({1, 0, 0}));
  CHECK(f.matrix * basis.second == iv({0, 1, 0}));
  CHECK(abs(determinant(f.matrix)) == 1);
  CHECK(f.matrix * f.inverse == IntMatrix::identity(3));
}

TEST_CASE("non-saturated basis cannot be completed") {
  CHECK(testing::code_of([] { complete_to_unimodular({iv({2, 0}), iv({0, 1})}); }) == ErrorCode::NotSaturated);
}

TEST_CASE("Smith form property sweep") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 2 + trial % 3, c = 2 + (trial / 3) % 3;
    std::vector<IntVec> rows(r, IntVec(c));
    for (auto& row : rows)
      for (auto& x : row) x = coef(rng);
    const IntMatrix a = IntMatrix::from_rows(rows);
    const SmithForm s = smith_normal_form(a);
    CHECK(s.u * a * s.v == s.d);
    CHECK(abs(determinant(s.u)) == 1);
    CHECK(abs(determinant(s.v)) == 1);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) CHECK(s.d(i, j) == 0);
    for (std::size_t i = 0; i + 1 < s.rank; ++i) CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
    CHECK(s.rank == rank(rows));
  }
}

TEST_CASE("Hermite form spans the same row lattice") {
  const IntMatrix a = IntMatrix::from_rows({iv({2, 4, 4}), iv({-6, 6, 12}), iv({10, -4, -16})});
  const IntMatrix h = hermite_normal_form(a);
  CHECK(h.rows() == 3);
  CHECK(abs(determinant(h)) == abs(determinant(a)));
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(h(i, j) == 0);
}
