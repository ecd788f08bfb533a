#include "tsl/lattice.hpp"

#include "tsl/error.hpp"

#include <algorithm>
#include <cassert>

namespace tsl {

namespace {

using boost::multiprecision::abs;

}  // namespace

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVec>& rows) {
  if (rows.empty()) return {};
  IntMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "ragged integer matrix");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

IntVec IntMatrix::row(std::size_t r) const {
  return IntVec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

IntVec IntMatrix::col(std::size_t c) const {
  IntVec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

void IntMatrix::negate_col(std::size_t c) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

IntVec operator*(const IntMatrix& a, const IntVec& v) {
  if (a.cols() != v.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
  IntVec out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] += a(i, k) * v[k];
  return out;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  assert(b > 0);
  BigInt q = a / b;
  if (a % b != 0 && a < 0) q -= 1;
  return q;
}

BigInt determinant(const IntMatrix& m) {
  // Bareiss fraction-free elimination.
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  if (n == 0) return 1;
  IntMatrix a = m;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  const BigInt det = determinant(m);
  if (abs(det) != 1) throw Error(ErrorCode::NotSaturated, "matrix is not unimodular");

  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m(i, j));
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    const Rational piv = a[c][c];
    for (auto& x : a[c]) x /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  IntMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& q = a[i][n + j];
      assert(denominator(q) == 1);
      inv(i, j) = numerator(q);
    }
  return inv;
}

SmithForm smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  SmithForm s{IntMatrix::identity(m), a, IntMatrix::identity(n), 0};
  IntMatrix& d = s.d;

  auto row_op = [&](std::size_t dst, std::size_t src, const BigInt& k) {
    d.add_row_multiple(dst, src, k);
    s.u.add_row_multiple(dst, src, k);
  };
  auto col_op = [&](std::size_t dst, std::size_t src, const BigInt& k) {
    d.add_col_multiple(dst, src, k);
    s.v.add_col_multiple(dst, src, k);
  };
  auto swap_r = [&](std::size_t x, std::size_t y) {
    d.swap_rows(x, y);
    s.u.swap_rows(x, y);
  };
  auto swap_c = [&](std::size_t x, std::size_t y) {
    d.swap_cols(x, y);
    s.v.swap_cols(x, y);
  };

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    bool found = false;
    std::size_t pi = t, pj = t;
    BigInt best;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        if (d(i, j) == 0) continue;
        if (!found || abs(d(i, j)) < best) {
          found = true;
          best = abs(d(i, j));
          pi = i;
          pj = j;
        }
      }
    if (!found) break;
    swap_r(t, pi);
    swap_c(t, pj);

    for (;;) {
      bool restart = false;
      for (std::size_t i = t + 1; i < m && !restart; ++i) {
        if (d(i, t) == 0) continue;
        row_op(i, t, -(d(i, t) / d(t, t)));
        if (d(i, t) != 0) {
          swap_r(i, t);
          restart = true;
        }
      }
      if (restart) continue;
      for (std::size_t j = t + 1; j < n && !restart; ++j) {
        if (d(t, j) == 0) continue;
        col_op(j, t, -(d(t, j) / d(t, t)));
        if (d(t, j) != 0) {
          swap_c(j, t);
          restart = true;
        }
      }
      if (restart) continue;
      for (std::size_t i = t + 1; i < m && !restart; ++i)
        for (std::size_t j = t + 1; j < n && !restart; ++j)
          if (d(i, j) % d(t, t) != 0) {
            row_op(t, i, 1);
            restart = true;
          }
      if (!restart) break;
    }
    if (d(t, t) < 0) {
      d.negate_row(t);
      s.u.negate_row(t);
    }
    s.rank = t + 1;
  }
  return s;
}

IntMatrix hermite_normal_form(const IntMatrix& a) {
  IntMatrix h = a;
  const std::size_t k = h.rows();
  const std::size_t n = h.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < k; ++c) {
    for (;;) {
      std::size_t p = k;
      for (std::size_t i = r; i < k; ++i)
        if (h(i, c) != 0 && (p == k || abs(h(i, c)) < abs(h(p, c)))) p = i;
      if (p == k) break;
      h.swap_rows(r, p);
      bool clean = true;
      for (std::size_t i = r + 1; i < k; ++i) {
        if (h(i, c) == 0) continue;
        h.add_row_multiple(i, r, -(h(i, c) / h(r, c)));
        if (h(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) h.negate_row(r);
    for (std::size_t i = 0; i < r; ++i) h.add_row_multiple(i, r, -floor_div(h(i, c), h(r, c)));
    ++r;
  }
  IntMatrix out(r, n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = h(i, j);
  return out;
}

BigInt gcd_of(const IntVec& v) {
  BigInt g = 0;
  for (const auto& x : v) g = gcd(g, abs(x));
  return g;
}

bool is_zero(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x == 0; });
}

IntVec negated(const IntVec& v) {
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

IntVec add(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector sizes differ");
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVec primitive(const IntVec& v) {
  const BigInt g = gcd_of(v);
  if (g == 0) throw Error(ErrorCode::ZeroVector, "primitive of the zero vector");
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
  return out;
}

std::size_t rank(const std::vector<IntVec>& vectors) {
  if (vectors.empty()) return 0;
  return smith_normal_form(IntMatrix::from_rows(vectors)).rank;
}

std::pair<IntVec, IntVec> saturated_rank2_basis(const std::vector<IntVec>& vectors) {
  if (vectors.empty()) throw Error(ErrorCode::RankMismatch, "no vectors given");
  const IntMatrix a = IntMatrix::from_rows(vectors);
  const SmithForm s = smith_normal_form(a);
  if (s.rank != 2)
    throw Error(ErrorCode::RankMismatch, "expected rank 2, got rank " + std::to_string(s.rank));
  // rows(A) = U^{-1} D V^{-1}, so the first two rows of V^{-1} span the saturation.
  const IntMatrix vinv = unimodular_inverse(s.v);
  IntMatrix sat(2, a.cols());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sat(i, j) = vinv(i, j);
  const IntMatrix h = hermite_normal_form(sat);
  return {h.row(0), h.row(1)};
}

UnimodularFrame complete_to_unimodular(const std::pair<IntVec, IntVec>& basis) {
  const std::size_t n = basis.first.size();
  if (n < 2 || basis.second.size() != n) throw Error(ErrorCode::DimensionMismatch, "basis vectors must share dimension >= 2");
  const IntMatrix bt = IntMatrix::from_rows({basis.first, basis.second});
  const SmithForm s = smith_normal_form(bt);
  if (s.rank != 2 || s.d(0, 0) != 1 || s.d(1, 1) != 1)
    throw Error(ErrorCode::NotSaturated, "basis does not span a saturated rank-2 lattice");

  // B^T = U^{-1} [I 0] V^{-1}. The rows b1, b2, (V^{-1})_3.. form a unimodular W^T.
  const IntMatrix vinv = unimodular_inverse(s.v);
  IntMatrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    w(i, 0) = basis.first[i];
    w(i, 1) = basis.second[i];
  }
  for (std::size_t j = 2; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) w(i, j) = vinv(j, i);

  IntMatrix f = unimodular_inverse(w);

  // Canonical form: the annihilator block (rows 3..n) in HNF, and rows 1..2
  // reduced modulo its pivots.
  if (n > 2) {
    IntMatrix ann(n - 2, n);
    for (std::size_t i = 2; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ann(i - 2, j) = f(i, j);
    const IntMatrix h = hermite_normal_form(ann);
    for (std::size_t i = 2; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) f(i, j) = h(i - 2, j);
    for (std::size_t hr = 0; hr < h.rows(); ++hr) {
      std::size_t pc = 0;
      while (h(hr, pc) == 0) ++pc;
      for (std::size_t r = 0; r < 2; ++r) f.add_row_multiple(r, 2 + hr, -floor_div(f(r, pc), h(hr, pc)));
    }
  }
  UnimodularFrame frame{f, unimodular_inverse(f)};
  return frame;
}

}  // namespace tsl
