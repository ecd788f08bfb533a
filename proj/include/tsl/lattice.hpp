#pragma once

// Exact integer linear algebra on small lattices: primitive vectors,
// saturation of rank-two sublattices, Hermite/Smith normal forms and
// unimodular completions.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace tsl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using IntVec = std::vector<BigInt>;
using RatVec = std::vector<Rational>;

/// Dense row-major integer matrix.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<IntVec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntVec row(std::size_t r) const;
  IntVec col(std::size_t c) const;
  IntMatrix transpose() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  /// col[dst] += k * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVec operator*(const IntMatrix& a, const IntVec& v);

BigInt determinant(const IntMatrix& m);

/// Exact inverse of a unimodular matrix. Throws NotSaturated if |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& m);

/// A unimodular change of lattice coordinates. `matrix` maps the chosen rank-2
/// basis to (e1, e2); rows 3..n of `matrix` span the annihilator of that basis.
struct UnimodularFrame {
  IntMatrix matrix;
  IntMatrix inverse;

  std::size_t dimension() const { return matrix.rows(); }
};

/// U * A * V = D with U, V unimodular and D diagonal with d_i | d_{i+1}.
struct SmithForm {
  IntMatrix u;
  IntMatrix d;
  IntMatrix v;
  std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& a);

/// Row-style Hermite normal form of the row lattice; zero rows dropped.
IntMatrix hermite_normal_form(const IntMatrix& a);

BigInt gcd_of(const IntVec& v);
bool is_zero(const IntVec& v);
IntVec negated(const IntVec& v);
IntVec add(const IntVec& a, const IntVec& b);

/// v / gcd(v). Throws ZeroVector for v = 0.
IntVec primitive(const IntVec& v);

/// Rank over Q of the given vectors.
std::size_t rank(const std::vector<IntVec>& vectors);

/// HNF basis of the saturation Z^n ∩ span_Q(vectors). Throws RankMismatch
/// unless the vectors span a rank-2 subspace.
std::pair<IntVec, IntVec> saturated_rank2_basis(const std::vector<IntVec>& vectors);

/// Unimodular frame F with F*b1 = e1, F*b2 = e2. Throws NotSaturated when the
/// basis does not span a saturated sublattice.
UnimodularFrame complete_to_unimodular(const std::pair<IntVec, IntVec>& basis);

/// floor(a / b) for b > 0.
BigInt floor_div(const BigInt& a, const BigInt& b);

}  // namespace tsl
