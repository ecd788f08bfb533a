#include "tsl/glue.hpp"

#include "tsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace tsl {

namespace {

std::vector<double> to_doubles(const RatVec& v, double scale = 1.0) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(scale * to_double(x));
  return out;
}

std::vector<double> to_doubles(const IntVec& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(static_cast<double>(x));
  return out;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Distance from x to the segment a + t d, t in [0, tmax] (tmax may be inf).
double distance_to_piece(const double* x, const std::vector<double>& a, const std::vector<double>& d, double tmax) {
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - a[i];
  const double dd = dot(d.data(), d.data(), n);
  const double t = std::clamp(dot(diff.data(), d.data(), n) / dd, 0.0, tmax);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = diff[i] - t * d[i];
    s += e * e;
  }
  return std::sqrt(s);
}

Complex nearest_root(const std::vector<Complex>& roots, double angle) {
  const Complex target = std::polar(1.0, angle);
  Complex best = roots.front();
  for (const auto& r : roots)
    if (std::abs(r - target) < std::abs(best - target)) best = r;
  return best;
}

void check_vertex(const VertexSkeleton& sk, const PhaseAssignment& a, std::optional<std::uint64_t> seed,
                  std::vector<std::string>& warnings) {
  const LaurentPoly poly = well_centred_poly(sk.polygon, facet_phases(sk, a), {seed});
  for (std::size_t k = 0; k < sk.polygon.facets.size(); ++k) facet_roots(poly, sk.polygon, k);
  try {
    const SmoothnessResult s = check_smooth(poly);
    if (!s.smooth) throw Error(ErrorCode::GeometryError, "vertex " + sk.vertex + " curve is singular");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    warnings.push_back("smoothness_uncertified:" + sk.vertex);
  }
}

}  // namespace

VertexSkeleton vertex_skeleton(const TropicalCurve& curve, const std::string& vertex) {
  const LocalFan fan = localize(curve, vertex);
  VertexSkeleton sk;
  sk.vertex = vertex;
  sk.edge_ids = fan.edge_ids;
  sk.frame = complete_to_unimodular(saturated_rank2_basis(fan.rays));
  std::vector<Vec2> normals;
  for (const auto& f : fan.rays) {
    const IntVec y = sk.frame.matrix * f;
    for (std::size_t i = 2; i < y.size(); ++i)
      if (y[i] != 0) throw Error(ErrorCode::RankMismatch, "ray outside the vertex plane at " + vertex);
    const Vec2 r{static_cast<long>(y[0]), static_cast<long>(y[1])};
    sk.rays.push_back(r);
    normals.push_back(quarter_turn(r));
  }
  sk.polygon = polygon_from_fan(normals);
  sk.facet_edges.assign(sk.polygon.facets.size(), {});
  for (std::size_t i = 0; i < normals.size(); ++i)
    sk.facet_edges[*sk.polygon.facet_with_normal(normals[i])].push_back(sk.edge_ids[i]);
  for (auto& ids : sk.facet_edges) std::sort(ids.begin(), ids.end());
  return sk;
}

std::vector<std::vector<double>> facet_phases(const VertexSkeleton& sk, const PhaseAssignment& a) {
  std::vector<std::vector<double>> out;
  for (const auto& ids : sk.facet_edges) {
    std::vector<double> ph;
    for (const auto& id : ids) ph.push_back(a.theta.at(id));
    out.push_back(ph);
  }
  return out;
}

std::optional<std::uint64_t> interior_seed(const VertexSkeleton& sk, std::uint64_t seed, std::size_t index) {
  if (sk.polygon.interior_points().empty()) return std::nullopt;
  return seed * 0x9E3779B97F4A7C15ULL + index + 1;
}

const VertexModel& MatchingDatum::vertex(const std::string& id) const {
  for (const auto& m : vertices)
    if (m.skeleton.vertex == id) return m;
  throw Error(ErrorCode::UnknownVertex, "unknown vertex " + id);
}

MatchingDatum build_matching(const TropicalCurve& curve, const KahlerData& kahler, double T,
                             const std::vector<double>& free_phases, std::uint64_t seed) {
  const ValidationReport bal = validate_balancing(curve);
  for (const auto& [v, ok] : bal.balanced)
    if (!ok) throw Error(ErrorCode::Unbalanced, bal.messages.front());
  const ValidationReport planar = validate_locally_planar(curve);
  for (const auto& [v, ok] : planar.locally_planar)
    if (!ok) throw Error(ErrorCode::RankMismatch, planar.messages.front());
  validate_kahler(kahler);
  if (kahler.dimension() != curve.dimension)
    throw Error(ErrorCode::DimensionMismatch, "metric dimension differs from curve dimension");
  if (!(T > 0.0)) throw Error(ErrorCode::ConfigError, "T must be positive");

  MatchingDatum d;
  d.curve = curve;
  d.kahler = kahler;
  d.T = T;
  d.seed = seed;

  std::vector<VertexSkeleton> skeletons;
  for (const auto& v : curve.vertex_ids()) skeletons.push_back(vertex_skeleton(curve, v));

  const PhaseAssignment initial = solve_phases(curve, free_phases);
  const GenericityCheck check = [&](const PhaseAssignment& a, std::vector<std::string>& warnings) {
    for (std::size_t i = 0; i < skeletons.size(); ++i)
      check_vertex(skeletons[i], a, interior_seed(skeletons[i], seed, i), warnings);
  };
  GenericityResult gen = genericity_sample(curve, initial, seed, check);
  d.phases = gen.assignment;
  d.genericity_attempts = gen.attempts;
  d.warnings = gen.warnings;

  for (std::size_t i = 0; i < skeletons.size(); ++i) {
    VertexModel m;
    m.skeleton = skeletons[i];
    m.reduced = reduce_kahler(kahler, m.skeleton.frame);
    m.poly = well_centred_poly(m.skeleton.polygon, facet_phases(m.skeleton, d.phases),
                               {interior_seed(m.skeleton, seed, i)});
    const RatVec& h = curve.position(m.skeleton.vertex);
    RatVec y(h.size(), Rational(0));
    for (std::size_t r = 0; r < h.size(); ++r)
      for (std::size_t c = 0; c < h.size(); ++c) y[r] += Rational(m.skeleton.frame.matrix(r, c)) * h[c];
    m.shift = {T * to_double(y[0]), T * to_double(y[1])};
    for (std::size_t r = 2; r < y.size(); ++r) m.p_v.push_back(T * to_double(y[r]));
    d.vertices.push_back(std::move(m));
  }

  for (const auto& e : curve.edges) d.cylinders.push_back(cylinder_from_edge(curve, e.id, d.phases, kahler, T));

  for (const auto& m : d.vertices) {
    const auto& sk = m.skeleton;
    for (std::size_t k = 0; k < sk.polygon.facets.size(); ++k) {
      const FacetRoots fr = facet_roots(m.poly, sk.polygon, k);
      for (const auto& id : sk.facet_edges[k]) {
        HalfCylinder h;
        h.vertex = sk.vertex;
        h.edge = id;
        h.direction = outward_direction(curve.edge(id), sk.vertex);
        h.base_point = to_doubles(curve.position(sk.vertex), T);
        h.root = nearest_root(fr.roots, d.phases.theta.at(id));
        d.halves.push_back(h);
      }
    }
  }
  std::sort(d.halves.begin(), d.halves.end(), [](const HalfCylinder& a, const HalfCylinder& b) {
    return std::tie(a.edge, a.vertex) < std::tie(b.edge, b.vertex);
  });
  return d;
}

MatchingReport check_matching(const MatchingDatum& d) {
  MatchingReport rep;
  auto fail = [&](const std::string& msg) {
    rep.passed = false;
    rep.failures.push_back(msg);
  };
  for (const auto& h : d.halves) {
    const double theta = d.phases.theta.at(h.edge);
    const double res = std::abs(wrap_signed(std::arg(h.root) - theta));
    rep.max_phase_residual = std::max(rep.max_phase_residual, res);
    if (std::abs(std::abs(h.root) - 1.0) > 1e-9)
      fail("edge " + h.edge + " at " + h.vertex + ": root off the unit circle");
    if (res > 1e-9) {
      std::ostringstream os;
      os << "edge " << h.edge << " at " << h.vertex << ": phase residual " << res;
      fail(os.str());
    }
  }

  rep.l_min = std::numeric_limits<double>::infinity();
  rep.l_max = 0.0;
  for (const auto& e : d.curve.edges) {
    if (e.external()) continue;
    std::vector<const HalfCylinder*> pair;
    for (const auto& h : d.halves)
      if (h.edge == e.id) pair.push_back(&h);
    if (pair.size() != 2) {
      fail("edge " + e.id + ": expected two half-cylinders");
      continue;
    }
    const HalfCylinder& a = *pair[0];
    const HalfCylinder& b = *pair[1];
    if (add(a.direction, b.direction) != IntVec(a.direction.size(), BigInt(0)))
      fail("edge " + e.id + ": half-cylinder directions disagree");
    // Both base points must lie on the same line along the edge direction.
    const auto dir = to_doubles(a.direction);
    std::vector<double> diff(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) diff[i] = b.base_point[i] - a.base_point[i];
    const double t = dot(diff.data(), dir.data(), dir.size()) / dot(dir.data(), dir.data(), dir.size());
    double off = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) off = std::max(off, std::abs(diff[i] - t * dir[i]));
    if (off > 1e-9 * std::max(1.0, d.T)) fail("edge " + e.id + ": half-cylinders lie on different lines");
    const double dphase = std::abs(wrap_signed(std::arg(a.root) - std::arg(b.root)));
    if (dphase > 1e-9) {
      std::ostringstream os;
      os << "edge " << e.id << ": phase constants differ by " << dphase;
      fail(os.str());
    }
    for (const auto& c : d.cylinders)
      if (c.edge == e.id) {
        rep.l_min = std::min(rep.l_min, c.length);
        rep.l_max = std::max(rep.l_max, c.length);
      }
  }
  if (std::isfinite(rep.l_min)) {
    rep.ratio = rep.l_max / rep.l_min;
    if (rep.l_min < kOverlapThreshold) {
      std::ostringstream os;
      os << "overlap length " << rep.l_min << " below threshold " << kOverlapThreshold;
      fail(os.str());
    }
  } else {
    rep.l_max = std::numeric_limits<double>::infinity();
  }
  return rep;
}

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

double smoothstep_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 30.0 * x * x * (x - 1.0) * (x - 1.0);
}

double smoothstep_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 60.0 * x * (x - 1.0) * (2.0 * x - 1.0);
}

namespace {

// Left cutoff: 1 for s <= -2, 0 for s >= -1.
double chi_left(double s) { return 1.0 - smoothstep(s + 2.0); }
double chi_left_d1(double s) { return -smoothstep_d1(s + 2.0); }
double chi_left_d2(double s) { return -smoothstep_d2(s + 2.0); }

}  // namespace

GluedProfile preglue_profile(const Profile& c_left, const Profile& c_right, double l, double ds) {
  if (l < kOverlapThreshold) throw Error(ErrorCode::OverlapTooShort, "overlap shorter than the cutoff bands need");
  GluedProfile g;
  const auto n = static_cast<std::size_t>(std::llround(l / ds));
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = -l / 2.0 + l * static_cast<double>(i) / static_cast<double>(n);
    const double cl = c_left(s), cr = c_right(s);
    const double xl = chi_left(s), xr = chi_left(-s);
    g.s.push_back(s);
    g.c_left.push_back(cl);
    g.c_right.push_back(cr);
    g.chi_left.push_back(xl);
    g.chi_right.push_back(xr);
    g.glued.push_back(cl * xl + cr * xr);
  }
  return g;
}

DecayFit fit_end_decay(const MatchingDatum& d, const std::string& vertex, const std::string& edge) {
  const VertexModel& m = d.vertex(vertex);
  const auto& sk = m.skeleton;
  std::size_t facet = 0;
  Vec2 ray{0, 0};
  for (std::size_t k = 0; k < sk.facet_edges.size(); ++k)
    for (const auto& id : sk.facet_edges[k])
      if (id == edge) facet = k;
  for (std::size_t i = 0; i < sk.edge_ids.size(); ++i)
    if (sk.edge_ids[i] == edge) ray = sk.rays[i];
  Complex root = 1.0;
  for (const auto& h : d.halves)
    if (h.vertex == vertex && h.edge == edge) root = h.root;

  std::vector<double> R_list;
  for (int i = 0; i <= 12; ++i) R_list.push_back(2.0 + 0.5 * i);
  const auto pts = asymptotic_decay(m.poly, sk.polygon, facet, root, R_list);
  DecayFit fit;
  fit.slope_R = decay_slope(pts);
  double mean_R = 0.0, mean_y = 0.0;
  for (const auto& p : pts) {
    mean_R += p.R;
    mean_y += std::log(std::max(p.deviation, 1e-300));
  }
  mean_R /= static_cast<double>(pts.size());
  mean_y /= static_cast<double>(pts.size());
  fit.amplitude = std::exp(mean_y - fit.slope_R * mean_R);

  // R grows like t det_root / (sin theta_hat |f'|) along the end.
  const Eigen::Vector2d f(static_cast<double>(ray[0]), static_cast<double>(ray[1]));
  const double speed = m.reduced.det_root / (std::sin(d.kahler.theta_hat) * std::sqrt(f.dot(m.reduced.g2 * f)));
  fit.rate = -fit.slope_R * speed;
  return fit;
}

std::map<std::string, EdgeError> err_estimate(const MatchingDatum& d) {
  std::map<std::string, EdgeError> out;
  for (const auto& c : d.cylinders) {
    const Edge& e = d.curve.edge(c.edge);
    if (e.external()) continue;
    const double l = c.length;
    if (l < kOverlapThreshold) throw Error(ErrorCode::OverlapTooShort, "edge " + e.id + " overlap too short");
    const DecayFit left = fit_end_decay(d, e.from, e.id);
    const DecayFit right = fit_end_decay(d, *e.to, e.id);
    // Band contribution of one end; s measured so that the band is [-2, -1].
    auto band = [&](const DecayFit& f, double s) {
      const double t = s + l / 2.0;
      const double cval = f.amplitude * std::exp(-f.rate * t);
      const double cd1 = -f.rate * cval;
      return std::abs(2.0 * cd1 * chi_left_d1(s) + cval * chi_left_d2(s));
    };
    EdgeError err;
    constexpr int n = 2000;
    for (int i = 0; i <= n; ++i) {
      const double s = -2.0 + static_cast<double>(i) / n;
      err.sup_error = std::max({err.sup_error, band(left, s), band(right, s)});
    }
    out[e.id] = err;
  }
  return out;
}

double default_clip_box(const TropicalCurve& curve) {
  double m = 0.0;
  for (const auto& [id, h] : curve.vertices)
    for (const auto& x : h) m = std::max(m, std::abs(to_double(x)));
  return 1.5 * m + 2.0;
}

double distance_to_curve(const TropicalCurve& curve, const double* x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : curve.edges) {
    const auto a = to_doubles(curve.position(e.from));
    if (e.external()) {
      best = std::min(best, distance_to_piece(x, a, to_doubles(e.direction), std::numeric_limits<double>::infinity()));
    } else {
      const auto b = to_doubles(curve.position(*e.to));
      std::vector<double> dir(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) dir[i] = b[i] - a[i];
      best = std::min(best, distance_to_piece(x, a, dir, 1.0));
    }
  }
  return best;
}

PointCloud sample_tropical_curve(const TropicalCurve& curve, double box, double step) {
  PointCloud out(curve.dimension);
  for (const auto& e : curve.edges) {
    const auto a = to_doubles(curve.position(e.from));
    std::vector<double> dir;
    double tmax = 1.0;
    if (e.external()) {
      dir = to_doubles(e.direction);
      tmax = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < dir.size(); ++i) {
        if (dir[i] > 0) tmax = std::min(tmax, (box - a[i]) / dir[i]);
        if (dir[i] < 0) tmax = std::min(tmax, (-box - a[i]) / dir[i]);
      }
    } else {
      const auto b = to_doubles(curve.position(*e.to));
      for (std::size_t i = 0; i < a.size(); ++i) dir.push_back(b[i] - a[i]);
    }
    if (!(tmax > 0.0)) continue;
    const double len = std::sqrt(dot(dir.data(), dir.data(), dir.size())) * tmax;
    const auto n = static_cast<std::size_t>(std::ceil(len / step));
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = tmax * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(n, 1));
      std::vector<double> p(a.size());
      bool inside = true;
      for (std::size_t i = 0; i < a.size(); ++i) {
        p[i] = a[i] + t * dir[i];
        if (std::abs(p[i]) > box * (1.0 + 1e-12)) inside = false;
      }
      if (inside) out.push(p);
    }
  }
  return out;
}

LogWindow vertex_window(const VertexModel& m, double theta_hat, double B) {
  const auto& F = m.skeleton.frame;
  const std::size_t n = F.dimension();
  // Rows: a u1 + b u2 + c with u the local moment coordinates.
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(F.inverse(i, 0)), b = static_cast<double>(F.inverse(i, 1));
    double c = a * m.shift[0] + b * m.shift[1];
    for (std::size_t k = 2; k < n; ++k) c += static_cast<double>(F.inverse(i, k)) * m.p_v[k - 2];
    rows.push_back({a, b, c});
  }
  std::vector<std::array<double, 3>> lines;  // a u1 + b u2 = rhs
  for (const auto& r : rows) {
    if (r[0] == 0.0 && r[1] == 0.0) continue;
    lines.push_back({r[0], r[1], B - r[2]});
    lines.push_back({r[0], r[1], -B - r[2]});
  }
  const double k = m.reduced.det_root / std::sin(theta_hat);
  LogWindow w{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
              {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  bool any = false;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& p = lines[i];
      const auto& q = lines[j];
      const double det = p[0] * q[1] - p[1] * q[0];
      if (std::abs(det) < 1e-12) continue;
      const double u1 = (p[2] * q[1] - p[1] * q[2]) / det;
      const double u2 = (p[0] * q[2] - p[2] * q[0]) / det;
      bool feasible = true;
      for (const auto& r : rows)
        if (std::abs(r[0] * u1 + r[1] * u2 + r[2]) > B * (1.0 + 1e-9) + 1e-9) feasible = false;
      if (!feasible) continue;
      any = true;
      const double l1 = -k * u2, l2 = k * u1;
      w.lo[0] = std::min(w.lo[0], l1);
      w.hi[0] = std::max(w.hi[0], l1);
      w.lo[1] = std::min(w.lo[1], l2);
      w.hi[1] = std::max(w.hi[1], l2);
    }
  if (!any) throw Error(ErrorCode::EmptyWindow, "vertex plane misses the clipping box");
  for (int i = 0; i < 2; ++i) {
    w.lo[static_cast<std::size_t>(i)] -= 1.0;
    w.hi[static_cast<std::size_t>(i)] += 1.0;
  }
  return w;
}

PointCloud rescaled_cloud(const MatchingDatum& d, int resolution, double box) {
  const std::size_t n = d.curve.dimension;
  PointCloud out(n);
  for (const auto& m : d.vertices) {
    const std::string& v = m.skeleton.vertex;
    const auto hv = to_doubles(d.curve.position(v));
    struct Ray {
      std::vector<double> dir;
      bool internal;
      std::vector<double> span;  // h(w) - h(v) for internal edges
    };
    std::vector<Ray> rays;
    for (const Edge* e : d.curve.incident(v)) {
      Ray r{to_doubles(outward_direction(*e, v)), !e->external(), {}};
      if (r.internal) {
        const auto hw = to_doubles(d.curve.position(e->from == v ? *e->to : e->from));
        for (std::size_t i = 0; i < n; ++i) r.span.push_back(hw[i] - hv[i]);
      }
      rays.push_back(std::move(r));
    }

    const LogWindow win = vertex_window(m, d.kahler.theta_hat, box * d.T);
    const auto pts = sample_curve(m.poly, win, SampleGrid{resolution});
    const PointCloud lifted = lift_to_base(pts, m.skeleton.frame, m.reduced, d.kahler.theta_hat, m.p_v, m.shift);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < lifted.size(); ++i) {
      bool inside = true;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] = lifted.point(i)[k] / d.T;
        if (std::abs(x[k]) > box) inside = false;
      }
      if (!inside) continue;
      double best = std::numeric_limits<double>::infinity();
      const Ray* nearest = nullptr;
      for (const auto& r : rays) {
        const double dist = distance_to_piece(x.data(), hv, r.dir, std::numeric_limits<double>::infinity());
        if (dist < best) {
          best = dist;
          nearest = &r;
        }
      }
      if (nearest && nearest->internal) {
        std::vector<double> rel(n);
        for (std::size_t k = 0; k < n; ++k) rel[k] = x[k] - hv[k];
        const double t = dot(rel.data(), nearest->span.data(), n) / dot(nearest->span.data(), nearest->span.data(), n);
        if (t > 0.5) continue;
      }
      out.push(x);
    }
  }
  return out;
}

ConvergenceTable convergence_test(const TropicalCurve& curve, const KahlerData& kahler,
                                  const std::vector<double>& free_phases, const std::vector<double>& T_list,
                                  const ConvergenceOptions& options) {
  if (T_list.size() < 3) throw Error(ErrorCode::ConfigError, "convergence test needs at least three T values");
  for (std::size_t i = 1; i < T_list.size(); ++i)
    if (!(T_list[i] > T_list[i - 1])) throw Error(ErrorCode::ConfigError, "T values must increase");
  ConvergenceTable table;
  table.clip_box = options.clip_box.value_or(default_clip_box(curve));
  const PointCloud gamma = sample_tropical_curve(curve, table.clip_box, table.clip_box / 4000.0);
  for (double T : T_list) {
    const MatchingDatum d = build_matching(curve, kahler, T, free_phases, options.seed);
    const PointCloud cloud = rescaled_cloud(d, options.resolution, table.clip_box);
    if (cloud.empty()) throw Error(ErrorCode::EmptyWindow, "no lifted points inside the clipping box");
    double to_gamma = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) to_gamma = std::max(to_gamma, distance_to_curve(curve, cloud.point(i)));
    const double from_gamma = directed_hausdorff(gamma, cloud);
    table.rows.push_back({T, std::max(to_gamma, from_gamma), cloud.size()});
  }
  std::vector<DecayPoint> pts;
  for (const auto& r : table.rows) pts.push_back({std::log(r.T), r.d_hausdorff});
  table.fitted_rate = decay_slope(pts);
  return table;
}

}  // namespace tsl
