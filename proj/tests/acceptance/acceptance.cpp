// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned here and nowhere else.

#include "tsl/config.hpp"
#include "tsl/error.hpp"
#include "tsl/glue.hpp"
#include "tsl/linear_surrogate.hpp"
#include "tsl/phase_solver.hpp"
#include "tsl/pipeline.hpp"
#include "tsl/serialize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace tsl;

namespace {

constexpr double kClassifySeconds = 1.0;
constexpr int kPhaseSolves = 10000;
constexpr double kPhaseResidual = 1e-9;
constexpr double kWellCentred = 1e-9;
constexpr double kPantsSlopeTol = 0.05;
constexpr double kDecaySeconds = 30.0;
constexpr double kConvergenceSeconds = 120.0;
constexpr int kRandomGraphs = 100;
constexpr double kFiedlerFloor = 1e-8;
constexpr double kObstructionResidual = 1e-10;
constexpr double kPinvMatch = 1e-8;
constexpr double kRatioDrop = 0.7;
constexpr double kParametrixResidual = 1e-8;
constexpr double kPoissonMatch = 1e-8;

const std::vector<std::string> kValid{"pants.json",          "two_vertex.json",    "triangle_cycle.json",
                                      "square_4valent.json", "doubled_pants.json", "r3_two_vertex.json",
                                      "index2_saturation.json"};

std::string fixture_text(const std::string& name) {
  std::ifstream in(std::string(TSL_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TropicalCurve fixture(const std::string& name) { return parse_curve(fixture_text(name)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

// -- 1 ----------------------------------------------------------------------
Outcome classification() {
  const json expected = json::parse(fixture_text("classification.json"));
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  int n = 0;
  for (const auto& [name, want] : expected.items()) {
    const TropicalCurve c = fixture(name);
    const ValidationReport b = validate_balancing(c), p = validate_locally_planar(c);
    bool bal = true, pl = true;
    for (const auto& [_, x] : b.balanced) bal = bal && x;
    for (const auto& [_, x] : p.locally_planar) pl = pl && x;
    if (bal != want.at("balanced").get<bool>() || pl != want.at("planar").get<bool>()) {
      o.ok = false;
      o.detail += name + " misclassified; ";
    }
    ++n;
  }
  const double dt = seconds_since(t0);
  o.ok = o.ok && n == 11 && dt < kClassifySeconds;
  std::ostringstream ss;
  ss << o.detail << n << " fixtures in " << dt << " s";
  o.detail = ss.str();
  return o;
}

// -- 2 ----------------------------------------------------------------------
Outcome phase_solves() {
  Outcome o;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int solves = 0;
  std::vector<TropicalCurve> curves;
  for (const auto& name : kValid) {
    curves.push_back(fixture(name));
    const TropicalCurve& c = curves.back();
    if (moduli_dimension(c) != c.edges.size() - c.vertices.size()) {
      o.ok = false;
      o.detail += name + " has wrong moduli dimension; ";
    }
  }
  while (solves < kPhaseSolves) {
    for (const auto& c : curves) {
      std::vector<double> free(moduli_dimension(c));
      for (auto& x : free) x = 2.0 * std::numbers::pi * unit_uniform(rng);
      const PhaseAssignment a = solve_phases(c, free);
      worst = std::max(worst, max_vertex_residual(c, a));
      ++solves;
    }
  }
  o.ok = o.ok && worst < kPhaseResidual;
  std::ostringstream ss;
  ss << o.detail << solves << " solves, max residual " << worst;
  o.detail = ss.str();
  return o;
}

// -- 3 ----------------------------------------------------------------------
Outcome well_centred() {
  Outcome o;
  double mod = 0.0, vieta = 0.0, sum = 0.0;
  int vertices = 0;
  for (const auto& name : kValid) {
    const TropicalCurve c = fixture(name);
    const KahlerData k = euclidean_kahler(c.dimension, std::numbers::pi / 2);
    const MatchingDatum d = build_matching(c, k, 20.0, random_free_values(c, 5), 5);
    for (const auto& v : d.vertices) {
      for (std::size_t f = 0; f < v.skeleton.polygon.facets.size(); ++f) {
        const FacetRoots r = facet_roots(v.poly, v.skeleton.polygon, f);
        for (const auto& z : r.roots) mod = std::max(mod, std::abs(std::abs(z) - 1.0));
        vieta = std::max(vieta, r.vieta_residual);
      }
      sum = std::max(sum, std::abs(phase_sum_check(facet_phases(v.skeleton, d.phases))));
      ++vertices;
    }
  }
  o.ok = mod < kWellCentred && vieta < kWellCentred && sum < kWellCentred;
  std::ostringstream ss;
  ss << vertices << " vertices, max ||a|-1| " << mod << ", Vieta " << vieta << ", phase sum " << sum;
  o.detail = ss.str();
  return o;
}

// -- 4 ----------------------------------------------------------------------
Outcome decay() {
  Outcome o;
  double pants_dev = 0.0, worst_other = -1e300, slowest = 0.0;
  for (const auto& name : kValid) {
    const auto t0 = std::chrono::steady_clock::now();
    const TropicalCurve c = fixture(name);
    const KahlerData k = euclidean_kahler(c.dimension, std::numbers::pi / 2);
    const MatchingDatum d = build_matching(c, k, 5.0, random_free_values(c, 5), 5);
    for (const auto& h : d.halves) {
      const DecayFit f = fit_end_decay(d, h.vertex, h.edge);
      if (name == "pants.json")
        pants_dev = std::max(pants_dev, std::abs(f.slope_R + 1.0));
      else
        worst_other = std::max(worst_other, f.slope_R);
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  o.ok = pants_dev < kPantsSlopeTol && worst_other < kDecaySlope && slowest < kDecaySeconds;
  std::ostringstream ss;
  ss << "pants |slope+1| " << pants_dev << ", worst other slope " << worst_other << ", slowest " << slowest << " s";
  o.detail = ss.str();
  return o;
}

// -- 5 ----------------------------------------------------------------------
Outcome convergence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream ss;
  for (const std::string name : {"pants.json", "two_vertex.json"}) {
    const TropicalCurve c = fixture(name);
    const KahlerData k = euclidean_kahler(2, std::numbers::pi / 2);
    ConvergenceOptions opts;
    opts.resolution = 128;
    opts.seed = 42;
    const ConvergenceTable t = convergence_test(c, k, random_free_values(c, 7), {5, 10, 20, 40}, opts);
    bool dec = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i) dec = dec && t.rows[i].d_hausdorff < t.rows[i - 1].d_hausdorff;
    const double first = t.rows.front().d_hausdorff, last = t.rows.back().d_hausdorff;
    o.ok = o.ok && dec && last < kFinalDistance && last / first < kDistanceRatio;
    ss << name << " d=";
    for (const auto& r : t.rows) ss << r.d_hausdorff << (&r == &t.rows.back() ? "" : ",");
    ss << "; ";
  }
  const double dt = seconds_since(t0);
  o.ok = o.ok && dt < kConvergenceSeconds;
  ss << dt << " s";
  o.detail = ss.str();
  return o;
}

// -- 6 ----------------------------------------------------------------------
MetricGraph random_graph(std::mt19937_64& rng) {
  MetricGraph g;
  const std::size_t n = 2 + static_cast<std::size_t>(unit_uniform(rng) * 11);  // 2..12
  for (std::size_t v = 0; v < n; ++v) g.vertices.push_back("v" + std::to_string(v));
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) return;
    used.insert({std::min(a, b), std::max(a, b)});
    g.edges.push_back({"e" + std::to_string(g.edges.size()), a, b, 8.0 + 22.0 * unit_uniform(rng), 0});
  };
  for (std::size_t v = 1; v < n; ++v) add(v, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(v)));
  const std::size_t extra = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
  for (std::size_t k = 0; k < extra; ++k)
    add(static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)),
        static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)));
  for (std::size_t v = 0; v < n; ++v)
    if (unit_uniform(rng) < 0.5) g.edges.push_back({"x" + std::to_string(v), v, std::nullopt, 0.0, 0});
  g.h_grid = 0.1;
  return g;
}

Outcome stiffness_graphs() {
  Outcome o;
  std::mt19937_64 rng(606);
  double asym = 0.0, min_eig = 1e300, fiedler = 1e300, resid = 0.0, pinv = 0.0;
  for (int k = 0; k < kRandomGraphs; ++k) {
    const MetricGraph g = random_graph(rng);
    const Discretization d = discretize(g);
    const Eigen::MatrixXd A = stiffness(d, build_partition(g, d));
    asym = std::max(asym, (A - A.transpose()).cwiseAbs().maxCoeff());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
    min_eig = std::min(min_eig, ev(0));
    fiedler = std::min(fiedler, ev(1));
    Eigen::VectorXd b(A.rows());
    for (auto& x : b) x = unit_uniform(rng) - 0.5;
    b.array() -= b.mean();
    const ObstructionSolution s = remove_obstructions(A, b);
    resid = std::max(resid, s.residual);
    const Eigen::VectorXd ref = A.completeOrthogonalDecomposition().pseudoInverse() * b;
    pinv = std::max(pinv, (s.x - ref).cwiseAbs().maxCoeff());
  }
  o.ok = asym == 0.0 && min_eig > -1e-12 && fiedler > kFiedlerFloor && resid < kObstructionResidual &&
         pinv < kPinvMatch;
  std::ostringstream ss;
  ss << kRandomGraphs << " graphs, asym " << asym << ", min eig " << min_eig << ", lambda2 " << fiedler
     << ", residual " << resid << ", pinv diff " << pinv;
  o.detail = ss.str();
  return o;
}

// -- 7 ----------------------------------------------------------------------
Outcome parametrix() {
  Outcome o;
  std::vector<double> ratios;
  double resid = 0.0, match = 0.0;
  for (double l : {10.0, 20.0, 40.0}) {
    MetricGraph g;
    g.vertices = {"a", "b"};
    g.edges.push_back({"c", 0, 1, l, 0});
    for (std::size_t v = 0; v < 2; ++v)
      for (int k = 0; k < 2; ++k) g.edges.push_back({"x" + std::to_string(2 * v + k), v, std::nullopt, 0.0, 0});
    const Discretization d = discretize(g);
    const Field f = localized_source(g, d, 0);
    const ParametrixResult r = parametrix_solve(g, f);
    ratios.push_back(r.diagnostics.contraction_ratio);
    const Field back = dstar(d, r.beta);
    resid = std::max({resid, (back.mode0 - f.mode0).cwiseAbs().maxCoeff(), (back.mode1 - f.mode1).cwiseAbs().maxCoeff()});
    // Mode 0 on a tree has a unique exact solution, so beta itself must agree.
    // The mode-1 part of the parametrix output is not exact and only its
    // divergence is determined.
    const PoissonResult p = graph_poisson(g, f);
    const Field direct = dstar(d, p.beta);
    match = std::max({match, (r.beta.t0 - p.beta.t0).cwiseAbs().maxCoeff(),
                      (back.mode0 - direct.mode0).cwiseAbs().maxCoeff(), (back.mode1 - direct.mode1).cwiseAbs().maxCoeff()});
  }
  o.ok = ratios[1] < ratios[0] && ratios[2] < ratios[1] && ratios[2] / ratios[1] < kRatioDrop &&
         resid < kParametrixResidual && match < kPoissonMatch;
  std::ostringstream ss;
  ss << "ratios " << ratios[0] << ", " << ratios[1] << ", " << ratios[2] << "; |d*b - f| " << resid
     << "; vs direct " << match;
  o.detail = ss.str();
  return o;
}

// -- 8 ----------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  std::size_t files = 0;
  for (const std::string name : {"pants.json", "two_vertex.json"}) {
    const TropicalCurve c = fixture(name);
    RunConfig cfg = parse_config(fixture_text("run_config.json"));
    finalize_config(cfg, c);
    const VerifyOutcome a = run_verify(c, cfg), b = run_verify(c, cfg);
    o.ok = o.ok && a.files == b.files && a.passed;
    files += a.files.size();
  }
  o.detail = std::to_string(files) + " artifacts compared byte for byte";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 validator classification", classification},
      {"2 phase solver residuals", phase_solves},
      {"3 well-centred vertex polynomials", well_centred},
      {"4 asymptotic end decay", decay},
      {"5 Hausdorff convergence", convergence},
      {"6 stiffness and obstruction removal", stiffness_graphs},
      {"7 parametrix contraction", parametrix},
      {"8 deterministic artifacts", determinism},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const Error& e) {
      o = {false, std::string(to_string(e.code())) + ": " + e.what()};
    } catch (const std::exception& e) {
      o = {false, e.what()};
    }
    all = all && o.ok;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << " | " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
