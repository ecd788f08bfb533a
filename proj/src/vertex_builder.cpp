#include "tsl/vertex_builder.hpp"

#include "tsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace tsl {

namespace {

// 0 for directions with angle in [0, pi), 1 for [pi, 2pi).
int half_plane(const Vec2& v) { return (v[1] < 0 || (v[1] == 0 && v[0] < 0)) ? 1 : 0; }

long cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

bool angle_less(const Vec2& a, const Vec2& b) {
  const int ha = half_plane(a), hb = half_plane(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0;
}

long dot(const Vec2& a, const Exponent& b) { return a[0] * b[0] + a[1] * b[1]; }

std::string fmt_vec(const Vec2& v) {
  std::ostringstream os;
  os << "(" << v[0] << "," << v[1] << ")";
  return os.str();
}

}  // namespace

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

double wrap_signed(double a) {
  double r = wrap_angle(a);
  if (r > std::numbers::pi) r -= 2.0 * std::numbers::pi;
  return r;
}

std::vector<Exponent> Facet::lattice_points() const {
  std::vector<Exponent> pts;
  for (long k = 0; k <= length; ++k) pts.push_back(point(k));
  return pts;
}

std::vector<Exponent> NewtonPolygon::boundary_points() const {
  std::vector<Exponent> pts;
  for (const auto& f : facets)
    for (long k = 0; k < f.length; ++k) pts.push_back(f.point(k));
  return pts;
}

std::vector<Exponent> NewtonPolygon::interior_points() const {
  std::vector<Exponent> pts;
  if (vertices.empty()) return pts;
  Exponent lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices)
    for (int i = 0; i < 2; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
    }
  for (long x = lo[0]; x <= hi[0]; ++x)
    for (long y = lo[1]; y <= hi[1]; ++y) {
      bool inside = true;
      for (const auto& f : facets) {
        if (dot(f.normal, {x - f.start[0], y - f.start[1]}) >= 0) {
          inside = false;
          break;
        }
      }
      if (inside) pts.push_back({x, y});
    }
  return pts;
}

std::optional<std::size_t> NewtonPolygon::facet_with_normal(const Vec2& n) const {
  for (std::size_t k = 0; k < facets.size(); ++k)
    if (facets[k].normal == n) return k;
  return std::nullopt;
}

NewtonPolygon polygon_from_fan(const std::vector<Vec2>& normals) {
  Vec2 sum{0, 0};
  for (const auto& n : normals) {
    if (n[0] == 0 && n[1] == 0) throw Error(ErrorCode::ZeroVector, "zero normal in fan");
    sum[0] += n[0];
    sum[1] += n[1];
  }
  if (sum[0] != 0 || sum[1] != 0)
    throw Error(ErrorCode::Unbalanced, "fan normals sum to " + fmt_vec(sum));

  std::vector<Vec2> sorted = normals;
  std::sort(sorted.begin(), sorted.end(), angle_less);
  std::vector<std::pair<Vec2, long>> grouped;
  for (const auto& n : sorted) {
    if (!grouped.empty() && grouped.back().first == n)
      ++grouped.back().second;
    else
      grouped.push_back({n, 1});
  }
  if (grouped.size() < 3) throw Error(ErrorCode::RankMismatch, "fan does not span the plane");

  std::vector<Exponent> pts{{0, 0}};
  for (const auto& [n, l] : grouped) {
    const Vec2 step = quarter_turn(n);
    const Exponent& p = pts.back();
    pts.push_back({p[0] + l * step[0], p[1] + l * step[1]});
  }
  pts.pop_back();  // closes up on the starting point

  const auto origin = static_cast<std::size_t>(std::min_element(pts.begin(), pts.end()) - pts.begin());
  const Exponent shift = pts[origin];
  NewtonPolygon poly;
  const std::size_t count = pts.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = (origin + i) % count;
    const Exponent v{pts[k][0] - shift[0], pts[k][1] - shift[1]};
    poly.vertices.push_back(v);
    Facet f;
    f.normal = grouped[k].first;
    f.length = grouped[k].second;
    f.start = v;
    f.step = quarter_turn(f.normal);
    poly.facets.push_back(f);
  }
  return poly;
}

UniPoly facet_polynomial(const LaurentPoly& poly, const NewtonPolygon& polygon, std::size_t facet) {
  const Facet& f = polygon.facets.at(facet);
  UniPoly p;
  for (long k = 0; k <= f.length; ++k) {
    auto it = poly.coeffs.find(f.point(k));
    p.coeffs.push_back(it == poly.coeffs.end() ? Complex(0.0) : it->second);
  }
  return p;
}

FacetRoots facet_roots(const LaurentPoly& poly, const NewtonPolygon& polygon, std::size_t facet, double tol) {
  const Facet& f = polygon.facets.at(facet);
  const UniPoly p = facet_polynomial(poly, polygon, facet);
  if (p.coeffs.front() == Complex(0.0) || p.coeffs.back() == Complex(0.0))
    throw Error(ErrorCode::GeometryError, "facet " + std::to_string(facet) + " endpoint coefficient vanishes");

  FacetRoots out;
  out.facet = facet;
  out.roots = polynomial_roots(p, 3);

  Complex prod = 1.0;
  double scale = 1.0;
  for (const auto& r : out.roots) {
    prod *= r;
    scale = std::max(scale, std::abs(r));
  }
  const double sign = (f.length % 2 == 0) ? 1.0 : -1.0;
  const Complex expected = sign * p.coeffs.front() / p.coeffs.back();
  out.vieta_residual = std::abs(prod - expected) / std::max(std::abs(expected), 1e-300);

  out.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.roots.size(); ++i)
    for (std::size_t j = i + 1; j < out.roots.size(); ++j)
      out.min_separation = std::min(out.min_separation, std::abs(out.roots[i] - out.roots[j]) / scale);
  if (out.min_separation < tol)
    throw Error(ErrorCode::RootCollision, "facet " + std::to_string(facet) + " has coincident roots");
  return out;
}

double phase_sum_check(const std::vector<std::vector<double>>& facet_phases) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& phases : facet_phases)
    for (double t : phases) {
      total += wrap_angle(t);
      ++count;
    }
  return wrap_signed(total - static_cast<double>(count) * std::numbers::pi);
}

LaurentPoly well_centred_poly(const NewtonPolygon& polygon, const std::vector<std::vector<double>>& facet_phases,
                              const InteriorCoefficients& interior) {
  if (facet_phases.size() != polygon.facets.size())
    throw Error(ErrorCode::DimensionMismatch, "one phase list per facet is required");

  LaurentPoly poly;
  Complex current = 1.0;
  for (std::size_t k = 0; k < polygon.facets.size(); ++k) {
    const Facet& f = polygon.facets[k];
    const auto& phases = facet_phases[k];
    if (static_cast<long>(phases.size()) != f.length)
      throw Error(ErrorCode::DimensionMismatch,
                  "facet " + std::to_string(k) + " needs " + std::to_string(f.length) + " phases");
    std::vector<Complex> roots;
    for (double t : phases) roots.push_back(std::polar(1.0, t));
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = i + 1; j < roots.size(); ++j)
        if (std::abs(roots[i] - roots[j]) < kRootTolerance)
          throw Error(ErrorCode::RootCollision, "facet " + std::to_string(k) + " has coincident phases");

    const std::vector<Complex> e = from_roots(roots);
    const Complex c = current / e.front();
    for (long j = 0; j < f.length; ++j) poly.coeffs[f.point(j)] = c * e[static_cast<std::size_t>(j)];
    current = c;  // leading coefficient of a monic factor
  }

  const double mismatch = std::abs(std::arg(current));
  if (mismatch > 1e-9) {
    std::ostringstream os;
    os << "boundary coefficients fail to close, angle mismatch " << mismatch;
    throw Error(ErrorCode::PhaseInconsistent, os.str());
  }

  if (interior.seed) {
    std::mt19937_64 rng(*interior.seed);
    for (const auto& m : polygon.interior_points()) {
      const double r = interior.max_modulus * unit_uniform(rng);
      const double t = 2.0 * std::numbers::pi * unit_uniform(rng);
      poly.coeffs[m] = std::polar(r, t);
    }
  }
  return poly;
}

}  // namespace tsl
