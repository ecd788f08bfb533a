#include "tsl/error.hpp"
#include "tsl/vertex_builder.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace tsl {

namespace {

namespace mp = boost::multiprecision;
using MpComplex = mp::cpp_complex_50;
using MpReal = mp::cpp_bin_float_50;

// Coefficient grid of f shifted into the positive quadrant: grid[i][j] is
// the coefficient of z1^i z2^j.
struct Grid {
  int d1 = 0, d2 = 0;
  std::vector<std::vector<Complex>> c;
};

Grid to_grid(const LaurentPoly& f) {
  const Exponent lo = f.min_exponent(), hi = f.max_exponent();
  Grid g;
  g.d1 = static_cast<int>(hi[0] - lo[0]);
  g.d2 = static_cast<int>(hi[1] - lo[1]);
  g.c.assign(static_cast<std::size_t>(g.d1 + 1), std::vector<Complex>(static_cast<std::size_t>(g.d2 + 1), 0.0));
  for (const auto& [m, a] : f.coeffs)
    g.c[static_cast<std::size_t>(m[0] - lo[0])][static_cast<std::size_t>(m[1] - lo[1])] += a;
  return g;
}

double relative_gradient(const LaurentPoly& f, Complex z1, Complex z2, bool include_value) {
  const auto g = f.log_gradient(z1, z2);
  double num = std::abs(g[0]) + std::abs(g[1]);
  if (include_value) num += std::abs(f(z1, z2));
  const double mag = f.magnitude(z1, z2);
  return mag > 0.0 ? num / mag : num;
}

// Newton on the log-gradient system in logarithmic coordinates u = log z.
// Converges quadratically to nondegenerate critical points such as nodes.
std::array<Complex, 2> refine_critical(const LaurentPoly& f, std::array<Complex, 2> z, int steps) {
  std::array<Complex, 2> u{std::log(z[0]), std::log(z[1])};
  for (int s = 0; s < steps; ++s) {
    const Complex z1 = std::exp(u[0]), z2 = std::exp(u[1]);
    Eigen::Vector2cd F = Eigen::Vector2cd::Zero();
    Eigen::Matrix2cd J = Eigen::Matrix2cd::Zero();
    for (const auto& [m, a] : f.coeffs) {
      const Complex t = a * ipow(z1, m[0]) * ipow(z2, m[1]);
      const double m0 = static_cast<double>(m[0]), m1 = static_cast<double>(m[1]);
      F(0) += m0 * t;
      F(1) += m1 * t;
      J(0, 0) += m0 * m0 * t;
      J(0, 1) += m0 * m1 * t;
      J(1, 0) += m1 * m0 * t;
      J(1, 1) += m1 * m1 * t;
    }
    const Complex det = J.determinant();
    if (std::abs(det) == 0.0) break;
    const Eigen::Vector2cd du = J.partialPivLu().solve(F);
    if (!du.allFinite()) break;
    u[0] -= du(0);
    u[1] -= du(1);
    if (std::abs(u[0].real()) > 700.0 || std::abs(u[1].real()) > 700.0) break;
    if (du.norm() < 1e-15 * (1.0 + std::abs(u[0]) + std::abs(u[1]))) break;
  }
  return {std::exp(u[0]), std::exp(u[1])};
}

struct Probe {
  double best = std::numeric_limits<double>::infinity();
  std::array<Complex, 2> at{};

  void offer(const LaurentPoly& f, Complex z1, Complex z2) {
    double g = relative_gradient(f, z1, z2, false);
    std::array<Complex, 2> p{z1, z2};
    if (g < 1e-3) {
      const auto r = refine_critical(f, p, 30);
      const double gr = relative_gradient(f, r[0], r[1], true);
      if (std::isfinite(gr) && gr < g) {
        g = gr;
        p = r;
      }
    }
    if (g < best) {
      best = g;
      at = p;
    }
  }
};

bool in_torus(Complex z) {
  const double r = std::abs(z);
  return std::isfinite(r) && r > 1e-10 && r < 1e10;
}

MpComplex to_mp(Complex z) { return MpComplex(z.real(), z.imag()); }

Complex to_double(const MpComplex& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Determinant by Gaussian elimination with partial pivoting.
MpComplex mp_determinant(std::vector<std::vector<MpComplex>> a) {
  const std::size_t n = a.size();
  MpComplex det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    MpReal best = abs(a[c][c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      MpReal v = abs(a[r][c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0) return MpComplex(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const MpComplex factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
    }
  }
  return det;
}

// Res_{z2}(g, dg/dz2) at a fixed z1, plus the Hadamard bound of the
// Sylvester matrix for judging whether the value is numerically zero.
std::pair<MpComplex, MpReal> discriminant_at(const Grid& g, const MpComplex& z1) {
  const int p = g.d2, q = g.d2 - 1;
  std::vector<MpComplex> P(static_cast<std::size_t>(p + 1), MpComplex(0));
  for (int j = 0; j <= p; ++j) {
    MpComplex acc(0);
    for (int i = g.d1; i >= 0; --i) acc = acc * z1 + to_mp(g.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    P[static_cast<std::size_t>(j)] = acc;
  }
  std::vector<MpComplex> Q(static_cast<std::size_t>(q + 1));
  for (int j = 0; j <= q; ++j) Q[static_cast<std::size_t>(j)] = MpComplex(j + 1) * P[static_cast<std::size_t>(j + 1)];

  const std::size_t n = static_cast<std::size_t>(p + q);
  std::vector<std::vector<MpComplex>> s(n, std::vector<MpComplex>(n, MpComplex(0)));
  for (int r = 0; r < q; ++r)
    for (int j = 0; j <= p; ++j) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + p - j)] = P[static_cast<std::size_t>(j)];
  for (int r = 0; r < p; ++r)
    for (int j = 0; j <= q; ++j)
      s[static_cast<std::size_t>(q + r)][static_cast<std::size_t>(r + q - j)] = Q[static_cast<std::size_t>(j)];

  MpReal bound(1);
  for (const auto& row : s) {
    MpReal norm2(0);
    for (const auto& x : row) norm2 += mp::norm(x);
    bound *= sqrt(norm2);
  }
  return {mp_determinant(std::move(s)), bound};
}

// f depends on a single variable (axis `axis`, coefficients `p`); the curve is
// a union of parallel lines, singular exactly at repeated nonzero roots.
SmoothnessResult one_variable(const LaurentPoly& f, const UniPoly& p, int axis, const SmoothnessOptions& opt) {
  SmoothnessResult res;
  res.method = "univariate";
  Probe probe;
  for (const auto& r : polynomial_roots(p, 3)) {
    if (!in_torus(r)) continue;
    const Complex other = std::polar(1.0, 0.5);
    if (axis == 0)
      probe.offer(f, r, other);
    else
      probe.offer(f, other, r);
  }
  res.min_relative_gradient = probe.best;
  if (probe.best < opt.singular_tol) {
    res.smooth = false;
    res.witness = probe.at;
  } else if (probe.best <= opt.smooth_tol) {
    throw Error(ErrorCode::Inconclusive, "relative gradient between thresholds");
  }
  return res;
}

SmoothnessResult multistart(const LaurentPoly& f, const SmoothnessOptions& opt) {
  SmoothnessResult res;
  res.method = "multistart";
  std::mt19937_64 rng(opt.seed);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opt.multistart_count; ++s) {
    const double r1 = -3.0 + 6.0 * unit_uniform(rng), t1 = 2.0 * std::numbers::pi * unit_uniform(rng);
    const double r2 = -3.0 + 6.0 * unit_uniform(rng), t2 = 2.0 * std::numbers::pi * unit_uniform(rng);
    const auto z = refine_critical(f, {std::exp(Complex(r1, t1)), std::exp(Complex(r2, t2))}, 40);
    if (!in_torus(z[0]) || !in_torus(z[1])) continue;
    const double g = relative_gradient(f, z[0], z[1], true);
    if (g < best) best = g;
    if (g < opt.singular_tol) {
      res.smooth = false;
      res.witness = z;
      res.min_relative_gradient = g;
      return res;
    }
  }
  throw Error(ErrorCode::Inconclusive, "no singular point found by multi-start search");
}

}  // namespace

SmoothnessResult check_smooth(const LaurentPoly& input, const SmoothnessOptions& opt) {
  LaurentPoly f;
  for (const auto& [m, a] : input.coeffs)
    if (a != Complex(0.0)) f.coeffs[m] = a;
  SmoothnessResult res;
  res.method = "resultant";
  res.min_relative_gradient = std::numeric_limits<double>::infinity();
  if (f.coeffs.size() <= 1) return res;  // a monomial has no zeros in the torus
  if (f.total_degree() > opt.exact_max_degree) return multistart(f, opt);

  const Grid g = to_grid(f);
  if (g.d2 == 0) return one_variable(f, f.slice(1, 1.0), 0, opt);
  if (g.d1 == 0) return one_variable(f, f.slice(0, 1.0), 1, opt);

  // R(z1) has degree at most d1 (2 d2 - 1); recover it by interpolation on
  // the unit circle.
  const int K = g.d1 * (2 * g.d2 - 1) + 1;
  std::vector<MpComplex> values(static_cast<std::size_t>(K));
  MpReal max_value(0), max_bound(0);
  const MpReal two_pi = 2 * boost::math::constants::pi<MpReal>();
  std::vector<MpComplex> omega(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const MpReal t = two_pi * k / K;
    omega[static_cast<std::size_t>(k)] = MpComplex(cos(t), sin(t));
    auto [v, b] = discriminant_at(g, omega[static_cast<std::size_t>(k)]);
    values[static_cast<std::size_t>(k)] = v;
    max_value = std::max(max_value, MpReal(abs(v)));
    max_bound = std::max(max_bound, b);
  }

  Probe probe;
  if (max_value < MpReal(1e-25) * max_bound) {
    // f and df/dz2 share a factor: f has a repeated component.
    const Complex z1 = std::polar(1.1, 0.3);
    const auto roots = polynomial_roots(f.slice(0, z1), 3);
    for (const auto& r : roots)
      if (in_torus(r)) probe.offer(f, z1, r);
    res.smooth = false;
    res.witness = probe.at;
    res.min_relative_gradient = probe.best;
    return res;
  }

  UniPoly R;
  MpReal max_coeff(0);
  std::vector<MpComplex> coeffs(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    MpComplex acc(0);
    for (int k = 0; k < K; ++k)
      acc += values[static_cast<std::size_t>(k)] * conj(omega[static_cast<std::size_t>((static_cast<long>(j) * k) % K)]);
    coeffs[static_cast<std::size_t>(j)] = acc / MpReal(K);
    max_coeff = std::max(max_coeff, MpReal(abs(coeffs[static_cast<std::size_t>(j)])));
  }
  for (const auto& c : coeffs) {
    // Normalise before dropping to double; interpolation noise is zeroed.
    const MpComplex scaled = c / max_coeff;
    R.coeffs.push_back(abs(scaled) < MpReal(1e-30) ? Complex(0.0) : to_double(scaled));
  }

  for (const auto& r : polynomial_roots(R, 3)) {
    if (!in_torus(r)) continue;
    const UniPoly sl = f.slice(0, r);
    double smax = 0.0, cmax = 0.0;
    for (const auto& c : sl.coeffs) smax = std::max(smax, std::abs(c));
    for (const auto& [m, a] : f.coeffs) cmax = std::max(cmax, std::abs(a) * std::pow(std::abs(r), m[0]));
    if (smax < 1e-10 * cmax) {
      // The line z1 = r lies on the curve; singular where the rest meets it.
      LaurentPoly d1;
      for (const auto& [m, a] : f.coeffs)
        if (m[0] != 0) d1.coeffs[m] = static_cast<double>(m[0]) * a;
      const UniPoly q = d1.slice(0, r);
      bool any = false;
      for (const auto& c : q.coeffs)
        if (std::abs(c) > 1e-10 * cmax) any = true;
      if (!any) {
        res.smooth = false;
        res.witness = std::array<Complex, 2>{r, Complex(1.0)};
        res.min_relative_gradient = 0.0;
        return res;
      }
      for (const auto& w : polynomial_roots(q, 3))
        if (in_torus(w)) {
          res.smooth = false;
          res.witness = std::array<Complex, 2>{r, w};
          res.min_relative_gradient = 0.0;
          return res;
        }
      continue;
    }
    for (const auto& w : polynomial_roots(sl, 3))
      if (in_torus(w)) probe.offer(f, r, w);
  }

  res.min_relative_gradient = probe.best;
  if (probe.best < opt.singular_tol) {
    res.smooth = false;
    res.witness = probe.at;
  } else if (probe.best <= opt.smooth_tol) {
    throw Error(ErrorCode::Inconclusive, "relative gradient between thresholds");
  }
  return res;
}

}  // namespace tsl
