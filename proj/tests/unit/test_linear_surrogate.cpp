#include "helpers.hpp"
#include "oracle_values.hpp"

#include "tsl/linear_surrogate.hpp"
#include "tsl/vertex_builder.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <random>

using namespace tsl;

namespace {

MetricGraph two_vertex_graph(double l, double h = 0.05) {
  MetricGraph g;
  g.vertices = {"a", "b"};
  g.h_grid = h;
  g.edges.push_back({"c", 0, 1, l, 0});
  g.edges.push_back({"x1", 0, std::nullopt, 0.0, 0});
  g.edges.push_back({"x2", 0, std::nullopt, 0.0, 0});
  g.edges.push_back({"y1", 1, std::nullopt, 0.0, 0});
  g.edges.push_back({"y2", 1, std::nullopt, 0.0, 0});
  return g;
}

MetricGraph triangle_graph(double l) {
  MetricGraph g;
  g.vertices = {"A", "B", "C"};
  g.edges.push_back({"AB", 0, 1, l, 0});
  g.edges.push_back({"BC", 1, 2, 1.5 * l, 0});
  g.edges.push_back({"CA", 2, 0, 1.2 * l, 0});
  for (std::size_t v = 0; v < 3; ++v) g.edges.push_back({"r" + std::to_string(v), v, std::nullopt, 0.0, 0});
  return g;
}

/// One vertex with a single Neumann leg of length L.
MetricGraph leg_graph(double L, double h) {
  MetricGraph g;
  g.vertices = {"o"};
  g.h_grid = h;
  g.l_ext = L;
  g.edges.push_back({"e", 0, std::nullopt, 0.0, 0});
  return g;
}

Eigen::VectorXd on_nodes(const Discretization& d, double (*fn)(double)) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.nodes));
  // the leg graph has a single edge, so node positions follow edge_nodes
  const auto& chain = d.edge_nodes.at(0);
  const double h = d.edge_length.at(0) / static_cast<double>(chain.size() - 1);
  for (std::size_t k = 0; k < chain.size(); ++k) v(static_cast<Eigen::Index>(chain[k])) = fn(h * static_cast<double>(k));
  return v;
}

constexpr double kLegL = 4.0;
double cos_mode(double t) { return std::cos(std::numbers::pi * t / kLegL); }
double rhs0(double t) { return -std::pow(std::numbers::pi / kLegL, 2) * cos_mode(t); }
double rhs1(double t) { return (-std::pow(std::numbers::pi / kLegL, 2) - 1.0) * cos_mode(t); }

double poisson_error(double h) {
  const MetricGraph g = leg_graph(kLegL, h);
  const Discretization d = discretize(g);
  Field f{on_nodes(d, rhs0), on_nodes(d, rhs1)};
  const PoissonResult r = graph_poisson(g, f);
  const Eigen::VectorXd exact = on_nodes(d, cos_mode);
  return std::max((r.u.mode0 - exact).cwiseAbs().maxCoeff(), (r.u.mode1 - exact).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("discretization bookkeeping") {
  const MetricGraph g = two_vertex_graph(10.0);
  CHECK(g.l_min() == 10.0);
  CHECK(g.l_max() == 10.0);
  CHECK(g.external_length() == 30.0);
  const Discretization d = discretize(g);
  double total = 0.0;
  for (double m : d.mass) total += m;
  CHECK(total == doctest::Approx(10.0 + 4 * 30.0));
  CHECK(d.edge_nodes.size() == 5);
  // gradient of a constant vanishes and integrate(divergence) is zero
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.nodes));
  CHECK(gradient(d, one).cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 rng(4);
  Eigen::VectorXd seg(static_cast<Eigen::Index>(d.segments.size()));
  for (auto& x : seg) x = unit_uniform(rng) - 0.5;
  seg(0) = 0.0;
  CHECK(std::abs(integrate(d, divergence(d, seg))) < 1e-10);

  MetricGraph pants;
  pants.vertices = {"v"};
  for (const char* e : {"e1", "e2", "e3"}) pants.edges.push_back({e, 0, std::nullopt, 0.0, 0});
  CHECK(std::isinf(pants.l_min()));
  CHECK(pants.external_length() == 24.0);
}

TEST_CASE("partition of unity") {
  for (const MetricGraph& g : {two_vertex_graph(12.0), triangle_graph(10.0)}) {
    const Discretization d = discretize(g);
    const Partition p = build_partition(g, d);
    REQUIRE(p.chi.size() == g.vertices.size());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.nodes));
    for (const auto& c : p.chi) {
      CHECK(c.minCoeff() >= 0.0);
      CHECK(c.maxCoeff() <= 1.0);
      sum += c;
    }
    CHECK((sum.array() - 1.0).abs().maxCoeff() < 1e-14);
  }
  const MetricGraph g = two_vertex_graph(12.0);
  const Discretization d = discretize(g);
  const Partition p = build_partition(g, d);
  const auto& chain = d.edge_nodes[0];
  const double h = 12.0 / static_cast<double>(chain.size() - 1);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const double t = h * static_cast<double>(k);
    const double chi = p.chi[0](static_cast<Eigen::Index>(chain[k]));
    if (t <= 4.999) CHECK(chi == 1.0);
    if (t >= 7.001) CHECK(chi == 0.0);
  }
}

TEST_CASE("edges shorter than the overlap are rejected") {
  const MetricGraph g = two_vertex_graph(7.5);
  const Discretization d = discretize(g);
  CHECK(testing::code_of([&] { build_partition(g, d); }) == ErrorCode::EdgeTooShort);
  CHECK(testing::code_of([&] { parametrix_solve(g, localized_source(g, d, 0)); }) == ErrorCode::EdgeTooShort);
}

TEST_CASE("stiffness of one band") {
  double prev_err = 1.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const MetricGraph g = two_vertex_graph(10.0, h);
    const Discretization d = discretize(g);
    const Eigen::MatrixXd A = stiffness(d, build_partition(g, d));
    CHECK((A - A.transpose()).norm() == 0.0);
    CHECK(std::abs(A.row(0).sum()) < 1e-13);
    CHECK(A(0, 1) == doctest::Approx(-A(0, 0)));
    const double err = std::abs(A(0, 0) - oracle::kBandStiffness);
    CHECK(err < 1e-2);
    CHECK(err <= prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-3);
}

TEST_CASE("stiffness kernel") {
  MetricGraph pants;
  pants.vertices = {"v"};
  for (const char* e : {"e1", "e2", "e3"}) pants.edges.push_back({e, 0, std::nullopt, 0.0, 0});
  const Discretization dp = discretize(pants);
  const Eigen::MatrixXd A0 = stiffness(dp, build_partition(pants, dp));
  REQUIRE(A0.rows() == 1);
  CHECK(A0(0, 0) == 0.0);

  const MetricGraph g = triangle_graph(10.0);
  const Discretization d = discretize(g);
  const Eigen::MatrixXd A = stiffness(d, build_partition(g, d));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
  CHECK(es.eigenvalues()(1) > 1e-2);
  const Eigen::VectorXd k = es.eigenvectors().col(0);
  CHECK((k.array() - k(0)).abs().maxCoeff() < 1e-10);
}

TEST_CASE("obstruction removal") {
  const double a = oracle::kBandStiffness;
  Eigen::MatrixXd A(2, 2);
  A << a, -a, -a, a;
  Eigen::VectorXd b(2);
  b << 1.0, -1.0;
  const ObstructionSolution s = remove_obstructions(A, b);
  CHECK(s.x(0) == doctest::Approx(1.0 / (2 * a)));
  CHECK(s.x(1) == doctest::Approx(-1.0 / (2 * a)));
  CHECK(s.residual < 1e-14);

  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK(testing::code_of([&] { remove_obstructions(A, bad); }) == ErrorCode::NotInRange);
}

TEST_CASE("obstruction removal matches the pseudo-inverse") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    // weighted Laplacian of a random connected graph
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    auto link = [&](int i, int j) {
      const double w = 0.1 + unit_uniform(rng);
      A(i, i) += w;
      A(j, j) += w;
      A(i, j) -= w;
      A(j, i) -= w;
    };
    for (int i = 1; i < n; ++i) link(i, static_cast<int>(unit_uniform(rng) * i));
    for (int extra = 0; extra < n; ++extra) {
      const int i = static_cast<int>(unit_uniform(rng) * n), j = static_cast<int>(unit_uniform(rng) * n);
      if (i != j) link(i, j);
    }
    Eigen::VectorXd b(n);
    for (auto& x : b) x = unit_uniform(rng) - 0.5;
    b.array() -= b.mean();
    const ObstructionSolution s = remove_obstructions(A, b);
    const Eigen::VectorXd ref = A.completeOrthogonalDecomposition().pseudoInverse() * b;
    CHECK((s.x - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(s.x.sum()) < 1e-10);
    CHECK(s.residual < 1e-12);
  }
}

TEST_CASE("Poisson solve converges at second order") {
  const double e1 = poisson_error(0.1), e2 = poisson_error(0.05), e3 = poisson_error(0.025);
  CHECK(e1 < 1e-2);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e2 / e3 >= 3.5);
}

TEST_CASE("Poisson solve needs zero mean in mode 0") {
  const MetricGraph g = two_vertex_graph(10.0);
  const Discretization d = discretize(g);
  Field f = Field::zero(d.nodes);
  f.mode0(0) = 1.0;
  CHECK(testing::code_of([&] { graph_poisson(g, f); }) == ErrorCode::NonZeroMean);
  CHECK(testing::code_of([&] { parametrix_solve(g, f); }) == ErrorCode::NonZeroMean);
}

TEST_CASE("localized source") {
  const MetricGraph g = two_vertex_graph(20.0);
  const Discretization d = discretize(g);
  const Field f = localized_source(g, d, 0);
  CHECK(std::abs(integrate(d, f.mode0)) < 1e-12);
  CHECK(f.mode1.maxCoeff() == doctest::Approx(1.0));
  CHECK(testing::code_of([&] { localized_source(g, d, 5); }) == ErrorCode::UnknownVertex);
}

TEST_CASE("parametrix on a zero source") {
  const MetricGraph g = two_vertex_graph(20.0);
  const Discretization d = discretize(g);
  const ParametrixResult r = parametrix_solve(g, Field::zero(d.nodes));
  CHECK(r.diagnostics.iterations == 0);
  CHECK(r.beta.sup() == 0.0);
}

TEST_CASE("parametrix agrees with the direct solve") {
  const MetricGraph g = two_vertex_graph(40.0);
  const Discretization d = discretize(g);
  const Field f = localized_source(g, d, 0);
  const ParametrixResult r = parametrix_solve(g, f);
  CHECK(r.diagnostics.residual < 1e-8);
  const Field back = dstar(d, r.beta);
  CHECK(std::max((back.mode0 - f.mode0).cwiseAbs().maxCoeff(), (back.mode1 - f.mode1).cwiseAbs().maxCoeff()) < 1e-8);
  const PoissonResult p = graph_poisson(g, f);
  CHECK((r.beta.t0 - p.beta.t0).cwiseAbs().maxCoeff() < 1e-7);
  const Field direct = dstar(d, p.beta);
  CHECK((back.mode1 - direct.mode1).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.diagnostics.contraction_ratio < 0.9);
  CHECK(r.diagnostics.obstruction_residual < 1e-10);
}

TEST_CASE("contraction improves with edge length") {
  std::vector<double> ratio;
  for (double l : {10.0, 20.0, 40.0}) {
    const MetricGraph g = two_vertex_graph(l);
    const Discretization d = discretize(g);
    const ParametrixResult r = parametrix_solve(g, localized_source(g, d, 0));
    CHECK(r.diagnostics.residual < 1e-8);
    ratio.push_back(r.diagnostics.contraction_ratio);
  }
  CHECK(ratio[1] < ratio[0]);
  CHECK(ratio[2] < ratio[1]);
  CHECK(ratio[2] / ratio[1] < 0.7);
}

TEST_CASE("mode 1 output is not exact on short edges") {
  // The cutoff sum leaves a non-exact fibre part; d* still matches f.
  const MetricGraph g = two_vertex_graph(10.0);
  const Discretization d = discretize(g);
  const Field f = localized_source(g, d, 0);
  const ParametrixResult r = parametrix_solve(g, f);
  const PoissonResult p = graph_poisson(g, f);
  CHECK((r.beta.t1 - p.beta.t1).cwiseAbs().maxCoeff() > 1e-6);
  CHECK((dstar(d, r.beta).mode1 - f.mode1).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("triangle cycle parametrix") {
  const MetricGraph g = triangle_graph(12.0);
  const Discretization d = discretize(g);
  const ParametrixResult r = parametrix_solve(g, localized_source(g, d, 1));
  CHECK(r.diagnostics.residual < 1e-8);
  CHECK(r.diagnostics.c_v_values.size() == 3);
}

TEST_CASE("scalar majorant") {
  const IterationHistory z = model_iteration(40.0, 0.0, 1.0);
  CHECK(z.converged);
  CHECK(z.fixed_point == 0.0);

  const IterationHistory h = model_iteration(40.0, 1e-3, 1.0);
  CHECK(h.converged);
  CHECK(h.fixed_point == doctest::Approx(oracle::kMajorantFixedPoint).epsilon(1e-12));
  CHECK(h.closed_form == doctest::Approx(oracle::kMajorantFixedPoint).epsilon(1e-12));
  CHECK(h.contraction < 1.0);
  for (std::size_t k = 1; k < h.norms.size(); ++k) CHECK(h.norms[k] >= h.norms[k - 1]);

  CHECK(testing::code_of([] { model_iteration(8.0, 1.0, 50.0); }) == ErrorCode::Divergence);
}
