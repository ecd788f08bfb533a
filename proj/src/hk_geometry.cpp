#include "tsl/hk_geometry.hpp"

#include "tsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace tsl {

Eigen::MatrixXd KahlerData::metric() const {
  const std::size_t n = g.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(g[i][j]);
  return m;
}

void validate_kahler(const KahlerData& k) {
  const std::size_t n = k.g.size();
  if (n < 2) throw Error(ErrorCode::ConfigError, "metric must be at least 2x2");
  for (const auto& row : k.g)
    if (row.size() != n) throw Error(ErrorCode::ConfigError, "metric must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (k.g[i][j] != k.g[j][i]) throw Error(ErrorCode::ConfigError, "metric must be symmetric");
  // Symmetric Gaussian elimination: all pivots positive iff all leading
  // minors are positive.
  std::vector<RatVec> a = k.g;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[c][c] <= 0) throw Error(ErrorCode::ConfigError, "metric is not positive definite");
    for (std::size_t r = c + 1; r < n; ++r) {
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t q = c; q < n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  if (!(k.theta_hat > 0.0 && k.theta_hat < std::numbers::pi))
    throw Error(ErrorCode::ConfigError, "theta_hat must lie in (0, pi)");
}

KahlerData euclidean_kahler(std::size_t n, double theta_hat) {
  KahlerData k;
  k.g = identity_metric(n);
  k.theta_hat = theta_hat;
  return k;
}

ReducedKahler reduce_kahler(const KahlerData& k, const UnimodularFrame& frame) {
  const std::size_t n = k.g.size();
  if (frame.dimension() != n) throw Error(ErrorCode::DimensionMismatch, "frame and metric dimensions differ");
  ReducedKahler red;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      Rational s = 0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          s += Rational(frame.inverse(p, i)) * k.g[p][q] * Rational(frame.inverse(q, j));
      red.g2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(s);
    }
  red.det_root = std::sqrt(red.g2(0, 0) * red.g2(1, 1) - red.g2(0, 1) * red.g2(1, 0));
  return red;
}

std::array<Complex, 2> hk_forward(double mu1, double mu2, double th1, double th2, const ReducedKahler& red,
                                  double theta_hat) {
  const double k = red.det_root / std::sin(theta_hat);
  const double cot = std::cos(theta_hat) / std::sin(theta_hat);
  const auto& g = red.g2;
  const Complex z1 = std::exp(Complex(-k * mu2, -cot * (g(0, 0) * mu1 + g(0, 1) * mu2) + th1));
  const Complex z2 = std::exp(Complex(k * mu1, -cot * (g(1, 0) * mu1 + g(1, 1) * mu2) + th2));
  return {z1, z2};
}

std::array<double, 4> hk_inverse(Complex z1, Complex z2, const ReducedKahler& red, double theta_hat) {
  if (z1 == Complex(0.0) || z2 == Complex(0.0))
    throw Error(ErrorCode::ZeroCoordinate, "hk_inverse needs both coordinates nonzero");
  const double s = std::sin(theta_hat) / red.det_root;
  const double cot = std::cos(theta_hat) / std::sin(theta_hat);
  const auto& g = red.g2;
  const double mu1 = s * std::log(std::abs(z2));
  const double mu2 = -s * std::log(std::abs(z1));
  const double th1 = wrap_angle(std::arg(z1) + cot * (g(0, 0) * mu1 + g(0, 1) * mu2));
  const double th2 = wrap_angle(std::arg(z2) + cot * (g(1, 0) * mu1 + g(1, 1) * mu2));
  return {mu1, mu2, th1, th2};
}

CylinderModel cylinder_from_edge(const TropicalCurve& curve, const std::string& edge,
                                 const PhaseAssignment& assignment, const KahlerData& kahler, double T) {
  const Edge& e = curve.edge(edge);
  CylinderModel c;
  c.edge = edge;
  c.direction = e.direction;
  for (const auto& x : curve.position(e.from)) c.base_point.push_back(T * to_double(x));
  c.phase_const = wrap_angle(assignment.theta.at(edge));
  c.length = T * edge_lengths(curve, kahler.g).at(edge);
  return c;
}

double relative_residual(const LaurentPoly& poly, Complex z1, Complex z2) {
  const double mag = poly.magnitude(z1, z2);
  const double v = std::abs(poly(z1, z2));
  return mag > 0.0 ? v / mag : v;
}

std::vector<std::array<Complex, 2>> sample_curve(const LaurentPoly& poly, const LogWindow& window,
                                                 const SampleGrid& grid) {
  std::vector<std::array<Complex, 2>> out;
  const int nm = grid.moduli(), na = grid.arguments();
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    const double lo = window.lo[static_cast<std::size_t>(axis)], hi = window.hi[static_cast<std::size_t>(axis)];
    const double olo = window.lo[static_cast<std::size_t>(other)], ohi = window.hi[static_cast<std::size_t>(other)];
    for (int i = 0; i < nm; ++i) {
      const double x = nm == 1 ? lo : lo + (hi - lo) * i / (nm - 1);
      for (int j = 0; j < na; ++j) {
        const Complex zf = std::polar(std::exp(x), 2.0 * std::numbers::pi * j / na);
        const UniPoly p = poly.slice(axis, zf);
        if (p.degree() <= 0) continue;
        for (const auto& r : polynomial_roots(p, 2)) {
          const double ar = std::abs(r);
          if (!(ar > 0.0) || !std::isfinite(ar)) continue;
          const double lr = std::log(ar);
          if (lr < olo || lr > ohi) continue;
          const std::array<Complex, 2> z = axis == 0 ? std::array<Complex, 2>{zf, r} : std::array<Complex, 2>{r, zf};
          if (relative_residual(poly, z[0], z[1]) < kSampleResidual) out.push_back(z);
        }
      }
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyWindow, "no curve points inside the sampling window");
  return out;
}

namespace {

// x * a + y * b = gcd(a, b) >= 0
long ext_gcd(long a, long b, long& x, long& y) {
  long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    const long q = a / b;
    long t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

}  // namespace

std::array<long, 2> complementary_exponent(const std::array<long, 2>& n) {
  long x = 0, y = 0;
  if (ext_gcd(n[0], n[1], x, y) != 1) throw Error(ErrorCode::NotSaturated, "facet normal is not primitive");
  const std::array<long, 2> mf = quarter_turn(n);
  const long dot = x * mf[0] + y * mf[1];
  const long norm2 = mf[0] * mf[0] + mf[1] * mf[1];
  const long k = static_cast<long>(std::floor(-static_cast<double>(dot) / static_cast<double>(norm2) + 0.5));
  return {x + k * mf[0], y + k * mf[1]};
}

std::vector<DecayPoint> asymptotic_decay(const LaurentPoly& poly, const NewtonPolygon& polygon, std::size_t facet,
                                         Complex root, const std::vector<double>& R_list) {
  if (R_list.empty()) return {};
  const Facet& F = polygon.facets.at(facet);
  const std::array<long, 2> mf = F.step, mp = complementary_exponent(F.normal);

  // z^m = w1^a w2^b with m = a m_F - b m'; the basis change has determinant 1.
  const long p = mf[0], q = -mp[0], r = mf[1], s = -mp[1];
  struct Term {
    long a, b;
    Complex c;
  };
  std::vector<Term> terms;
  long amin = 0, bmin = 0;
  bool first = true;
  for (const auto& [m, c] : poly.coeffs) {
    if (c == Complex(0.0)) continue;
    const long a = s * m[0] - q * m[1], b = -r * m[0] + p * m[1];
    terms.push_back({a, b, c});
    amin = first ? a : std::min(amin, a);
    bmin = first ? b : std::min(bmin, b);
    first = false;
  }
  long amax = 0;
  for (auto& t : terms) {
    t.a -= amin;
    t.b -= bmin;
    amax = std::max(amax, t.a);
  }
  auto slice = [&](Complex w2) {
    UniPoly u;
    u.coeffs.assign(static_cast<std::size_t>(amax + 1), 0.0);
    for (const auto& t : terms) u.coeffs[static_cast<std::size_t>(t.a)] += t.c * ipow(w2, t.b);
    return u;
  };

  // Separation of `root` from the other roots of the facet polynomial.
  double sep = 1.0;
  {
    const UniPoly fp = slice(0.0);
    bool found = false;
    for (const auto& other : polynomial_roots(fp, 3)) {
      const double d = std::abs(other - root);
      if (d < 1e-8 * std::max(1.0, std::abs(root)) && !found) {
        found = true;
        continue;
      }
      if (other != Complex(0.0)) sep = std::min(sep, d);
    }
    if (!found) throw Error(ErrorCode::ComponentNotFound, "root is not a root of the facet polynomial");
  }

  std::set<double, std::greater<>> radii(R_list.begin(), R_list.end());
  const double rmin = *std::min_element(R_list.begin(), R_list.end());
  const double rtop = *std::max_element(R_list.begin(), R_list.end()) + 3.0;
  for (double R = rtop; R > rmin; R -= 0.05) radii.insert(R);

  constexpr int n_phi = 32;
  std::map<double, double> worst;
  for (double R : R_list) worst[R] = 0.0;
  for (int k = 0; k < n_phi; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n_phi;
    Complex prev = root;
    bool started = false;
    for (double R : radii) {
      const auto roots = polynomial_roots(slice(std::polar(std::exp(-R), phi)), 3);
      if (roots.empty()) throw Error(ErrorCode::ComponentNotFound, "slice has no roots");
      Complex best = roots.front();
      for (const auto& w : roots)
        if (std::abs(w - prev) < std::abs(best - prev)) best = w;
      if (!started && std::abs(best - root) > 0.25 * sep)
        throw Error(ErrorCode::ComponentNotFound, "no branch near the asymptotic root");
      started = true;
      prev = best;
      auto it = worst.find(R);
      if (it != worst.end()) it->second = std::max(it->second, std::abs(best - root));
    }
  }
  std::vector<DecayPoint> out;
  for (double R : R_list) out.push_back({R, worst.at(R)});
  return out;
}

double decay_slope(const std::vector<DecayPoint>& points) {
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double y = std::log(std::max(p.deviation, 1e-300));
    sx += p.R;
    sy += y;
    sxx += p.R * p.R;
    sxy += p.R * y;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

PointCloud lift_to_base(const std::vector<std::array<Complex, 2>>& cloud, const UnimodularFrame& frame,
                        const ReducedKahler& red, double theta_hat, const std::vector<double>& p_v,
                        const std::array<double, 2>& shift) {
  const std::size_t n = frame.dimension();
  if (p_v.size() + 2 != n) throw Error(ErrorCode::DimensionMismatch, "fibre moments must have n - 2 entries");
  Eigen::MatrixXd W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(frame.inverse(i, j));
  PointCloud out(n);
  out.coords.reserve(cloud.size() * n);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k + 2 < n; ++k) y(static_cast<Eigen::Index>(k + 2)) = p_v[k];
  for (const auto& z : cloud) {
    const auto hk = hk_inverse(z[0], z[1], red, theta_hat);
    y(0) = hk[0] + shift[0];
    y(1) = hk[1] + shift[1];
    const Eigen::VectorXd x = W * y;
    out.coords.insert(out.coords.end(), x.data(), x.data() + x.size());
  }
  return out;
}

}  // namespace tsl
