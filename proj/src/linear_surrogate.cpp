#include "tsl/linear_surrogate.hpp"

#include "tsl/error.hpp"
#include "tsl/tropical_curve.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace tsl {

namespace {

constexpr double kOverlap = 8.0;  // shortest internal edge the partition accepts

double step5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double MetricGraph::l_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges)
    if (e.to) m = std::min(m, e.length);
  return m;
}

double MetricGraph::l_max() const {
  double m = 0.0;
  for (const auto& e : edges)
    if (e.to) m = std::max(m, e.length);
  return m;
}

double MetricGraph::external_length() const {
  if (l_ext > 0.0) return l_ext;
  const double lm = l_max();
  return lm > 0.0 ? 3.0 * lm : 24.0;
}

MetricGraph metric_graph_from_curve(const TropicalCurve& curve, const std::map<std::string, double>& base_lengths,
                                    double T, double h_grid) {
  MetricGraph g;
  g.h_grid = h_grid;
  g.vertices = curve.vertex_ids();
  auto index = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(g.vertices.begin(), g.vertices.end(), v) - g.vertices.begin());
  };
  for (const auto& e : curve.edges) {
    GraphEdge ge;
    ge.id = e.id;
    ge.from = index(e.from);
    if (e.to) {
      ge.to = index(*e.to);
      const auto it = base_lengths.find(e.id);
      if (it == base_lengths.end()) throw Error(ErrorCode::ConfigError, "no length for edge " + e.id);
      ge.length = T * it->second;
    }
    g.edges.push_back(ge);
  }
  return g;
}

Discretization discretize(const MetricGraph& g) {
  Discretization d;
  d.nodes = g.vertices.size();
  const double l_ext = g.external_length();
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    double L = e.to ? e.length : l_ext;
    if (!e.to && e.segments > 0 && e.length > 0.0) L = e.length;
    if (!(L > 0.0)) throw Error(ErrorCode::EdgeTooShort, "edge " + e.id + " has nonpositive length");
    const std::size_t N =
        e.segments > 0 ? e.segments : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(L / g.h_grid)));
    const double h = L / static_cast<double>(N);
    std::vector<std::size_t> chain{e.from};
    for (std::size_t k = 1; k < N; ++k) chain.push_back(d.nodes++);
    chain.push_back(e.to ? *e.to : d.nodes++);
    for (std::size_t k = 0; k < N; ++k)
      d.segments.push_back({chain[k], chain[k + 1], h, ei, (static_cast<double>(k) + 0.5) * h});
    d.edge_nodes.push_back(std::move(chain));
    d.edge_length.push_back(L);
  }
  d.mass.assign(d.nodes, 0.0);
  for (const auto& s : d.segments) {
    d.mass[s.a] += 0.5 * s.h;
    d.mass[s.b] += 0.5 * s.h;
  }
  for (std::size_t i = 0; i < d.nodes; ++i)
    if (d.mass[i] <= 0.0) throw Error(ErrorCode::GeometryError, "isolated vertex in metric graph");
  return d;
}

Field Field::zero(std::size_t nodes) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes)), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes))};
}

double Field::sup() const { return std::max(sup_norm(mode0), sup_norm(mode1)); }

OneForm OneForm::zero(const Discretization& d) {
  const auto s = static_cast<Eigen::Index>(d.segments.size());
  const auto n = static_cast<Eigen::Index>(d.nodes);
  return {Eigen::VectorXd::Zero(s), Eigen::VectorXd::Zero(s), Eigen::VectorXd::Zero(n)};
}

double OneForm::sup() const { return std::max({sup_norm(t0), sup_norm(t1), sup_norm(y1)}); }

Eigen::VectorXd divergence(const Discretization& d, const Eigen::VectorXd& seg) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.nodes));
  for (std::size_t k = 0; k < d.segments.size(); ++k) {
    const auto& s = d.segments[k];
    out[static_cast<Eigen::Index>(s.a)] += seg[static_cast<Eigen::Index>(k)];
    out[static_cast<Eigen::Index>(s.b)] -= seg[static_cast<Eigen::Index>(k)];
  }
  for (std::size_t i = 0; i < d.nodes; ++i) out[static_cast<Eigen::Index>(i)] /= d.mass[i];
  return out;
}

Eigen::VectorXd gradient(const Discretization& d, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(d.segments.size()));
  for (std::size_t k = 0; k < d.segments.size(); ++k) {
    const auto& s = d.segments[k];
    out[static_cast<Eigen::Index>(k)] = (u[static_cast<Eigen::Index>(s.b)] - u[static_cast<Eigen::Index>(s.a)]) / s.h;
  }
  return out;
}

Field dstar(const Discretization& d, const OneForm& beta, double mass) {
  return {divergence(d, beta.t0), divergence(d, beta.t1) - mass * beta.y1};
}

double integrate(const Discretization& d, const Eigen::VectorXd& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.nodes; ++i) s += d.mass[i] * f[static_cast<Eigen::Index>(i)];
  return s;
}

Field localized_source(const MetricGraph& g, const Discretization& d, std::size_t vertex) {
  if (vertex >= g.vertices.size()) throw Error(ErrorCode::UnknownVertex, "no vertex with index " + std::to_string(vertex));
  Field f = Field::zero(d.nodes);
  Eigen::VectorXd near = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.nodes));
  Eigen::VectorXd far = near;
  near[static_cast<Eigen::Index>(vertex)] = 1.0;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    if (e.from != vertex && !(e.to && *e.to == vertex)) continue;
    auto chain = d.edge_nodes[ei];
    if (e.from != vertex) std::reverse(chain.begin(), chain.end());
    const double h = d.edge_length[ei] / static_cast<double>(chain.size() - 1);
    // stop before the far endpoint so other vertices stay untouched
    for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
      const double t = static_cast<double>(k) * h;
      const auto i = static_cast<Eigen::Index>(chain[k]);
      near[i] = std::exp(-t);
      far[i] = t * t * std::exp(-t);
    }
  }
  f.mode0 = near - (integrate(d, near) / integrate(d, far)) * far;
  f.mode1 = near;
  return f;
}

Partition build_partition(const MetricGraph& g, const Discretization& d) {
  Partition p;
  const auto n = static_cast<Eigen::Index>(d.nodes);
  p.chi.assign(g.vertices.size(), Eigen::VectorXd::Zero(n));
  for (std::size_t v = 0; v < g.vertices.size(); ++v) p.chi[v][static_cast<Eigen::Index>(v)] = 1.0;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    const auto& chain = d.edge_nodes[ei];
    if (!e.to) {
      for (auto node : chain) p.chi[e.from][static_cast<Eigen::Index>(node)] = 1.0;
      continue;
    }
    const double l = d.edge_length[ei];
    if (l < kOverlap) {
      std::ostringstream msg;
      msg << "edge " << e.id << " has length " << l << " < " << kOverlap;
      throw Error(ErrorCode::EdgeTooShort, msg.str());
    }
    const double h = l / static_cast<double>(chain.size() - 1);
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const double t = static_cast<double>(k) * h;
      const double c = 1.0 - step5((t - (0.5 * l - 1.0)) / 2.0);
      p.chi[e.from][static_cast<Eigen::Index>(chain[k])] = c;
      p.chi[*e.to][static_cast<Eigen::Index>(chain[k])] = 1.0 - c;
    }
  }
  return p;
}

Eigen::MatrixXd stiffness(const Discretization& d, const Partition& p) {
  const auto V = static_cast<Eigen::Index>(p.chi.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(V, V);
  Eigen::VectorXd grad(V);
  for (const auto& s : d.segments) {
    for (Eigen::Index v = 0; v < V; ++v)
      grad[v] = (p.chi[static_cast<std::size_t>(v)][static_cast<Eigen::Index>(s.b)] -
                 p.chi[static_cast<std::size_t>(v)][static_cast<Eigen::Index>(s.a)]) /
                s.h;
    if (grad.cwiseAbs().maxCoeff() == 0.0) continue;
    A.noalias() += s.h * grad * grad.transpose();
  }
  return A;
}

ObstructionSolution remove_obstructions(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const auto n = A.rows();
  if (A.cols() != n || b.size() != n) throw Error(ErrorCode::DimensionMismatch, "stiffness and load sizes differ");
  const double total = b.sum();
  const double scale = std::max(1.0, b.lpNorm<1>());
  if (std::abs(total) > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "load has nonzero total " << total;
    throw Error(ErrorCode::NotInRange, msg.str());
  }
  ObstructionSolution out;
  // A is PSD with kernel spanned by the constants on a connected graph, so
  // A + 11^T/n is SPD and its solution is orthogonal to the kernel.
  const Eigen::MatrixXd M = A + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  out.x = M.ldlt().solve(b);
  out.residual = (A * out.x - b).norm() / std::max(1.0, b.norm());
  const double b1 = b.lpNorm<1>();
  out.bound = b1 > 0.0 ? out.x.lpNorm<Eigen::Infinity>() / b1 : 0.0;
  return out;
}

struct PoissonSolver::Impl {
  std::vector<double> lumped;  // copied so the solver outlives the discretization
  double mass = 0.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

PoissonSolver::PoissonSolver(const Discretization& d, double mass) : impl_(std::make_unique<Impl>()) {
  impl_->lumped = d.mass;
  impl_->mass = mass;
  const auto n = static_cast<Eigen::Index>(d.nodes);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * d.segments.size() + d.nodes);
  const bool pin = mass == 0.0;
  auto add = [&](std::size_t i, std::size_t j, double v) {
    if (pin && i == 0) return;
    trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
  };
  // Row i: sum_j (u_j - u_i)/h_ij - mass^2 m_i u_i = m_i f_i.
  for (const auto& s : d.segments) {
    const double w = 1.0 / s.h;
    add(s.a, s.b, w);
    add(s.a, s.a, -w);
    add(s.b, s.a, w);
    add(s.b, s.b, -w);
  }
  for (std::size_t i = 0; i < d.nodes; ++i) add(i, i, -mass * mass * d.mass[i]);
  if (pin) trip.emplace_back(0, 0, 1.0);
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  impl_->lu.analyzePattern(S);
  impl_->lu.factorize(S);
  if (impl_->lu.info() != Eigen::Success) throw Error(ErrorCode::GeometryError, "graph Laplacian factorization failed");
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;

Eigen::VectorXd PoissonSolver::solve(const Eigen::VectorXd& f) const {
  const auto& m = impl_->lumped;
  if (static_cast<std::size_t>(f.size()) != m.size())
    throw Error(ErrorCode::DimensionMismatch, "source size differs from the discretization");
  Eigen::VectorXd rhs(f.size());
  for (std::size_t i = 0; i < m.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = m[i] * f[static_cast<Eigen::Index>(i)];
  if (impl_->mass == 0.0) rhs[0] = 0.0;
  Eigen::VectorXd u = impl_->lu.solve(rhs);
  if (impl_->mass == 0.0) {
    double total = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      total += m[i];
      moment += m[i] * u[static_cast<Eigen::Index>(i)];
    }
    u.array() -= moment / total;
  }
  return u;
}

PoissonResult graph_poisson(const MetricGraph& g, const Field& f, double mass) {
  const Discretization d = discretize(g);
  const double mean = integrate(d, f.mode0);
  double scale = 0.0;
  for (std::size_t i = 0; i < d.nodes; ++i) scale += d.mass[i] * std::abs(f.mode0[static_cast<Eigen::Index>(i)]);
  if (std::abs(mean) > 1e-10 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "fibre-constant source has integral " << mean;
    throw Error(ErrorCode::NonZeroMean, msg.str());
  }
  PoissonResult out;
  out.u.mode0 = PoissonSolver(d, 0.0).solve(f.mode0);
  out.u.mode1 = PoissonSolver(d, mass).solve(f.mode1);
  out.beta.t0 = gradient(d, out.u.mode0);
  out.beta.t1 = gradient(d, out.u.mode1);
  out.beta.y1 = mass * out.u.mode1;
  const Field r = dstar(d, out.beta, mass);
  out.residual = std::max(sup_norm(r.mode0 - f.mode0), sup_norm(r.mode1 - f.mode1));
  return out;
}

namespace {

// Local model around one vertex: its edges as half-lines with the graph's
// spacing, internal ones extended to the external length.
struct Star {
  std::size_t vertex = 0;
  Discretization disc;
  struct Leg {
    std::size_t edge = 0;                  // graph edge
    std::vector<std::size_t> graph_nodes;  // outward from the vertex
    std::vector<std::size_t> graph_segs;
    double sign = 1.0;  // orientation of graph segments relative to outward
    double cut = std::numeric_limits<double>::infinity();  // cutoff start 2l/3
  };
  std::vector<Leg> legs;
  std::unique_ptr<PoissonSolver> solver0, solver1;
};

Star make_star(const MetricGraph& g, const Discretization& d, const std::vector<std::vector<std::size_t>>& seg_of_edge,
               std::size_t v, double mass) {
  Star st;
  st.vertex = v;
  MetricGraph sg;
  sg.vertices = {g.vertices[v]};
  sg.h_grid = g.h_grid;
  const double l_ext = g.external_length();
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    for (int end = 0; end < 2; ++end) {
      const bool at_from = end == 0 && e.from == v;
      const bool at_to = end == 1 && e.to && *e.to == v;
      if (!at_from && !at_to) continue;
      const std::size_t N = d.edge_nodes[ei].size() - 1;
      const double h = d.edge_length[ei] / static_cast<double>(N);
      GraphEdge leg;
      leg.id = e.id;
      leg.from = 0;
      if (e.to) {
        leg.segments = std::max<std::size_t>(N, static_cast<std::size_t>(std::ceil(l_ext / h)));
      } else {
        leg.segments = N;
      }
      leg.length = h * static_cast<double>(leg.segments);
      sg.edges.push_back(leg);

      Star::Leg info;
      info.edge = ei;
      info.graph_nodes = d.edge_nodes[ei];
      info.graph_segs = seg_of_edge[ei];
      if (at_to) {
        std::reverse(info.graph_nodes.begin(), info.graph_nodes.end());
        std::reverse(info.graph_segs.begin(), info.graph_segs.end());
        info.sign = -1.0;
      }
      if (e.to) info.cut = 2.0 * d.edge_length[ei] / 3.0;
      st.legs.push_back(std::move(info));
    }
  }
  st.disc = discretize(sg);
  st.solver0 = std::make_unique<PoissonSolver>(st.disc, 0.0);
  st.solver1 = std::make_unique<PoissonSolver>(st.disc, mass);
  return st;
}

// Cutoff along a leg: 1 up to 2l/3, 0 from 2l/3 + 1.
double leg_cutoff(const Star::Leg& leg, double t) { return 1.0 - step5(t - leg.cut); }

}  // namespace

ParametrixResult parametrix_solve(const MetricGraph& g, const Field& f, const ParametrixOptions& options) {
  const Discretization d = discretize(g);
  const Partition part = build_partition(g, d);
  const Eigen::MatrixXd A = stiffness(d, part);
  const std::size_t V = g.vertices.size();
  const double mass = options.mass;

  {
    const double mean = integrate(d, f.mode0);
    double scale = 0.0;
    for (std::size_t i = 0; i < d.nodes; ++i) scale += d.mass[i] * std::abs(f.mode0[static_cast<Eigen::Index>(i)]);
    if (std::abs(mean) > 1e-10 * std::max(1.0, scale)) {
      std::ostringstream msg;
      msg << "fibre-constant source has integral " << mean;
      throw Error(ErrorCode::NonZeroMean, msg.str());
    }
  }

  std::vector<std::vector<std::size_t>> seg_of_edge(g.edges.size());
  for (std::size_t k = 0; k < d.segments.size(); ++k) seg_of_edge[d.segments[k].edge].push_back(k);

  std::vector<Eigen::VectorXd> dchi(V), lap_chi(V);
  for (std::size_t v = 0; v < V; ++v) {
    dchi[v] = gradient(d, part.chi[v]);
    lap_chi[v] = divergence(d, dchi[v]);
  }
  std::vector<Star> stars;
  for (std::size_t v = 0; v < V; ++v) stars.push_back(make_star(g, d, seg_of_edge, v, mass));

  // Distance of every node and segment midpoint to the nearest vertex.
  Eigen::VectorXd node_dist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.nodes));
  Eigen::VectorXd seg_dist(static_cast<Eigen::Index>(d.segments.size()));
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& chain = d.edge_nodes[ei];
    const double L = d.edge_length[ei];
    const double h = L / static_cast<double>(chain.size() - 1);
    const std::size_t last = g.edges[ei].to ? chain.size() - 1 : chain.size();
    for (std::size_t k = 1; k < last; ++k) {
      const double t = static_cast<double>(k) * h;
      node_dist[static_cast<Eigen::Index>(chain[k])] = g.edges[ei].to ? std::min(t, L - t) : t;
    }
    for (auto s : seg_of_edge[ei]) {
      const double t = d.segments[s].t_mid;
      seg_dist[static_cast<Eigen::Index>(s)] = g.edges[ei].to ? std::min(t, L - t) : t;
    }
  }

  ParametrixResult out;
  auto& diag = out.diagnostics;
  diag.l_min = g.l_min();
  diag.l_max = g.l_max();
  diag.c_v_values.assign(V, 0.0);
  out.beta = OneForm::zero(d);
  OneForm beta1 = OneForm::zero(d);

  double f_scale = f.sup();
  Field r = f;
  double r_norm = r.sup();
  if (r_norm < options.tolerance) {
    diag.residual = r_norm;
    return out;
  }

  for (int it = 1; it <= options.max_iterations; ++it) {
    // Obstruction removal: make every chi_v-localized source integrate to zero.
    Eigen::VectorXd b(static_cast<Eigen::Index>(V));
    for (std::size_t v = 0; v < V; ++v) b[static_cast<Eigen::Index>(v)] = integrate(d, part.chi[v].cwiseProduct(r.mode0));
    const ObstructionSolution obs = remove_obstructions(A, b);
    Eigen::VectorXd f2 = r.mode0;
    for (std::size_t v = 0; v < V; ++v) f2 += obs.x[static_cast<Eigen::Index>(v)] * lap_chi[v];
    for (std::size_t v = 0; v < V; ++v)
      diag.obstruction_residual =
          std::max(diag.obstruction_residual,
                   std::abs(integrate(d, part.chi[v].cwiseProduct(f2))) / std::max(1.0, f_scale));

    OneForm inc = OneForm::zero(d);
    for (std::size_t v = 0; v < V; ++v) {
      const Star& st = stars[v];
      const auto sn = static_cast<Eigen::Index>(st.disc.nodes);
      Eigen::VectorXd g0 = Eigen::VectorXd::Zero(sn), g1 = Eigen::VectorXd::Zero(sn);
      for (std::size_t j = 0; j < st.legs.size(); ++j) {
        const auto& leg = st.legs[j];
        const auto& snodes = st.disc.edge_nodes[j];
        for (std::size_t k = 0; k < leg.graph_nodes.size(); ++k) {
          const auto gi = static_cast<Eigen::Index>(leg.graph_nodes[k]);
          const double c = part.chi[v][gi];
          g0[static_cast<Eigen::Index>(snodes[k])] = c * f2[gi];
          g1[static_cast<Eigen::Index>(snodes[k])] = c * r.mode1[gi];
        }
      }
      const Eigen::VectorXd u0 = st.solver0->solve(g0);
      const Eigen::VectorXd u1 = st.solver1->solve(g1);
      const Eigen::VectorXd s0 = gradient(st.disc, u0);
      const Eigen::VectorXd s1 = gradient(st.disc, u1);
      for (std::size_t j = 0; j < st.legs.size(); ++j) {
        const auto& leg = st.legs[j];
        const auto& snodes = st.disc.edge_nodes[j];
        std::size_t seg_base = 0;
        for (std::size_t q = 0; q < j; ++q) seg_base += st.disc.edge_nodes[q].size() - 1;
        for (std::size_t k = 0; k < leg.graph_segs.size(); ++k) {
          const auto ss = static_cast<Eigen::Index>(seg_base + k);
          const double cut = leg_cutoff(leg, st.disc.segments[static_cast<std::size_t>(ss)].t_mid);
          if (cut == 0.0) break;
          const auto gs = static_cast<Eigen::Index>(leg.graph_segs[k]);
          inc.t0[gs] += leg.sign * cut * s0[ss];
          inc.t1[gs] += leg.sign * cut * s1[ss];
        }
        const double hk = st.disc.segments[seg_base].h;
        for (std::size_t k = 1; k < leg.graph_nodes.size(); ++k) {
          const double cut = leg_cutoff(leg, static_cast<double>(k) * hk);
          if (cut == 0.0) break;
          inc.y1[static_cast<Eigen::Index>(leg.graph_nodes[k])] += cut * mass * u1[static_cast<Eigen::Index>(snodes[k])];
        }
      }
      inc.y1[static_cast<Eigen::Index>(v)] += mass * u1[0];
    }
    beta1.t0 += inc.t0;
    beta1.t1 += inc.t1;
    beta1.y1 += inc.y1;
    for (std::size_t v = 0; v < V; ++v) {
      inc.t0 -= obs.x[static_cast<Eigen::Index>(v)] * dchi[v];
      diag.c_v_values[v] -= obs.x[static_cast<Eigen::Index>(v)];
    }
    out.beta.t0 += inc.t0;
    out.beta.t1 += inc.t1;
    out.beta.y1 += inc.y1;

    const Field applied = dstar(d, out.beta, mass);
    Field next{f.mode0 - applied.mode0, f.mode1 - applied.mode1};
    const double next_norm = next.sup();
    const double ratio = next_norm / r_norm;
    diag.ratios.push_back(ratio);
    diag.contraction_ratio = std::max(diag.contraction_ratio, ratio);
    diag.iterations = it;
    r = std::move(next);
    r_norm = next_norm;
    diag.residual = r_norm;
    if (r_norm < options.tolerance) break;
    if (ratio >= 0.9) {
      std::ostringstream msg;
      msg << "parametrix residual ratio " << ratio << " at step " << it << " (l_min " << diag.l_min << ")";
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
    if (it == options.max_iterations)
      throw Error(ErrorCode::NoConvergence, "parametrix iteration limit reached");
  }

  diag.beta1_norm = beta1.sup();
  double w = 0.0;
  for (Eigen::Index s = 0; s < seg_dist.size(); ++s) {
    const double weight = std::exp(-options.delta * seg_dist[s]);
    w = std::max({w, weight * std::abs(beta1.t0[s]), weight * std::abs(beta1.t1[s])});
  }
  for (Eigen::Index i = 0; i < node_dist.size(); ++i)
    w = std::max(w, std::exp(-options.delta * node_dist[i]) * std::abs(beta1.y1[i]));
  diag.beta1_weighted_norm = w;
  return out;
}

IterationHistory model_iteration(double l_min, double err0, double q, const MajorantOptions& options) {
  if (!(l_min > 0.0) || err0 < 0.0 || q < 0.0 || options.K < 0.0)
    throw Error(ErrorCode::ConfigError, "majorant parameters must be nonnegative with l_min > 0");
  const double e = std::exp(-options.c * l_min / 2.0);
  const double K = options.K;
  IterationHistory h;

  const double a = 1.0 - q * K * e;
  const double disc = a * a - 4.0 * q * K * K * err0;
  if (q * K == 0.0) {
    h.closed_form = err0;
  } else if (a <= 0.0 || disc < 0.0) {
    h.closed_form = std::numeric_limits<double>::quiet_NaN();
  } else {
    h.closed_form = 2.0 * err0 / (a + std::sqrt(disc));
  }

  double x = err0;
  h.norms.push_back(x);
  double prev_inc = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int k = 0; k < options.max_iterations; ++k) {
    const double next = err0 + q * K * x * (e + K * x);
    if (!std::isfinite(next)) throw Error(ErrorCode::Divergence, "majorant iteration overflowed");
    const double inc = std::abs(next - x);
    h.norms.push_back(next);
    x = next;
    if (inc <= 1e-15 * std::max(1.0, x)) {
      h.converged = true;
      break;
    }
    growth = inc > prev_inc ? growth + 1 : 0;
    if (growth >= 3) {
      std::ostringstream msg;
      msg << "majorant increments grew three times in a row (l_min " << l_min << ", err0 " << err0 << ")";
      throw Error(ErrorCode::Divergence, msg.str());
    }
    prev_inc = inc;
  }
  if (!h.converged) throw Error(ErrorCode::Divergence, "majorant iteration did not settle");
  h.fixed_point = x;
  h.contraction = q * K * (e + 2.0 * K * x);
  return h;
}

}  // namespace tsl
