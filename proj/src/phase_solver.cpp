#include "tsl/phase_solver.hpp"

#include "tsl/error.hpp"
#include "tsl/vertex_builder.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

namespace tsl {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

std::size_t moduli_dimension(const TropicalCurve& curve) {
  const std::size_t e = curve.edges.size(), v = curve.vertices.size();
  return e >= v ? e - v : 0;
}

EliminationPlan elimination_plan(const TropicalCurve& curve) {
  const auto ids = curve.vertex_ids();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  const std::size_t inf = ids.size();

  std::vector<const Edge*> order;
  for (const auto& e : curve.edges) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const Edge* a, const Edge* b) {
    if (a->external() != b->external()) return a->external();
    return a->id > b->id;
  });

  UnionFind uf(ids.size() + 1);
  std::set<std::string> tree;
  for (const Edge* e : order) {
    const std::size_t a = index.at(e->from);
    const std::size_t b = e->external() ? inf : index.at(*e->to);
    if (uf.unite(a, b)) tree.insert(e->id);
  }
  if (tree.size() != ids.size())
    throw Error(ErrorCode::OverConstrained, "phase constraints cannot be eliminated: no external edge reachable");

  EliminationPlan plan;
  for (const auto& e : curve.edges)
    if (!tree.count(e.id)) plan.free_edges.push_back(e.id);

  // Leaves first: a vertex is ready once exactly one of its tree edges is
  // still unsolved.
  std::set<std::string> solved, done;
  while (done.size() < ids.size()) {
    bool progressed = false;
    for (const auto& v : ids) {
      if (done.count(v)) continue;
      std::vector<std::string> open;
      for (const Edge* e : curve.incident(v))
        if (tree.count(e->id) && !solved.count(e->id) &&
            std::find(open.begin(), open.end(), e->id) == open.end())
          open.push_back(e->id);
      if (open.size() != 1) continue;
      plan.steps.push_back({v, open.front()});
      solved.insert(open.front());
      done.insert(v);
      progressed = true;
      break;
    }
    if (!progressed) throw Error(ErrorCode::OverConstrained, "elimination stalled");
  }
  return plan;
}

PhaseAssignment solve_phases(const TropicalCurve& curve, const std::vector<double>& free_values) {
  const EliminationPlan plan = elimination_plan(curve);
  if (free_values.size() != plan.free_edges.size())
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(plan.free_edges.size()) +
                                                  " free phases, got " + std::to_string(free_values.size()));
  PhaseAssignment out;
  for (std::size_t i = 0; i < free_values.size(); ++i) {
    out.free_params.push_back({plan.free_edges[i], free_values[i]});
    out.theta[plan.free_edges[i]] = wrap_angle(free_values[i]);
  }
  for (const auto& [v, pivot] : plan.steps) {
    const auto inc = curve.incident(v);
    double rest = 0.0;
    for (const Edge* e : inc)
      if (e->id != pivot) rest += out.theta.at(e->id);
    // A loop cannot occur (parse rejects them), so the pivot appears once.
    out.theta[pivot] = wrap_angle(static_cast<double>(inc.size()) * std::numbers::pi - rest);
  }
  return out;
}

std::vector<double> random_free_values(const TropicalCurve& curve, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(moduli_dimension(curve));
  for (auto& x : out) x = 2.0 * std::numbers::pi * unit_uniform(rng);
  return out;
}

double vertex_residual(const TropicalCurve& curve, const PhaseAssignment& a, const std::string& vertex) {
  const auto inc = curve.incident(vertex);
  double sum = 0.0;
  for (const Edge* e : inc) sum += a.theta.at(e->id);
  return std::abs(wrap_signed(sum - static_cast<double>(inc.size()) * std::numbers::pi));
}

double max_vertex_residual(const TropicalCurve& curve, const PhaseAssignment& a) {
  double worst = 0.0;
  for (const auto& v : curve.vertex_ids()) worst = std::max(worst, vertex_residual(curve, a, v));
  return worst;
}

GenericityResult genericity_sample(const TropicalCurve& curve, const PhaseAssignment& assignment,
                                   std::uint64_t seed, const GenericityCheck& check) {
  GenericityResult result;
  std::vector<std::string> failures;
  try {
    check(assignment, result.warnings);
    result.assignment = assignment;
    return result;
  } catch (const Error& e) {
    failures.push_back(std::string(to_string(e.code())));
  }

  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= kGenericityAttempts; ++attempt) {
    std::vector<double> values;
    for (const auto& [id, angle] : assignment.free_params)
      values.push_back(angle + kGenericityStep * (2.0 * unit_uniform(rng) - 1.0));
    const PhaseAssignment candidate = solve_phases(curve, values);
    std::vector<std::string> warnings;
    try {
      check(candidate, warnings);
      result.assignment = candidate;
      result.attempts = attempt;
      result.warnings = std::move(warnings);
      return result;
    } catch (const Error& e) {
      failures.push_back(std::string(to_string(e.code())));
    }
  }
  throw Error(ErrorCode::GenericityExhausted,
              "no generic phases after " + std::to_string(kGenericityAttempts) + " perturbations (last: " +
                  failures.back() + ")");
}

}  // namespace tsl
