#pragma once

// Metric-graph model of the linearized problem d* beta = f on a glued
// surface: a node-based discretization with lumped mass, the partition of
// unity and its stiffness matrix, obstruction removal, direct Poisson solves
// and the parametrix Neumann series.
//
// Fields carry two fibre modes. Mode 0 is fibre-constant (operator
// d* d = u''); mode 1 is the first fibre Fourier mode of mass m (operator
// u'' - m^2 u), whose exponential tails are what the cutoff transfer chops.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsl {

struct TropicalCurve;

struct GraphEdge {
  std::string id;
  std::size_t from = 0;
  std::optional<std::size_t> to;  // none: external, truncated at l_ext
  double length = 0.0;            // ignored for external edges unless segments > 0
  std::size_t segments = 0;       // 0: derive from the grid spacing
};

struct MetricGraph {
  std::vector<std::string> vertices;
  std::vector<GraphEdge> edges;
  double h_grid = 0.05;
  double l_ext = 0.0;  // 0: 3 l_max (24 without internal edges)

  double l_min() const;  // +inf without internal edges
  double l_max() const;  // 0 without internal edges
  double external_length() const;
};

/// Graph of the curve with internal edge lengths T * base_lengths.
MetricGraph metric_graph_from_curve(const TropicalCurve& curve, const std::map<std::string, double>& base_lengths,
                                    double T, double h_grid = 0.05);

struct Discretization {
  struct Segment {
    std::size_t a = 0, b = 0;  // oriented a -> b, away from the edge's start
    double h = 0.0;
    std::size_t edge = 0;
    double t_mid = 0.0;  // distance of the midpoint from the edge's start
  };
  std::size_t nodes = 0;
  std::vector<double> mass;
  std::vector<Segment> segments;
  /// Node indices along each edge from its start to its end (or far end).
  std::vector<std::vector<std::size_t>> edge_nodes;
  std::vector<double> edge_length;  // effective (possibly truncated) lengths
};

Discretization discretize(const MetricGraph& g);

/// Node values for both fibre modes.
struct Field {
  Eigen::VectorXd mode0, mode1;

  static Field zero(std::size_t nodes);
  double sup() const;
};

/// An exact 1-form in both modes: segment derivatives t0, t1 and the fibre
/// component y1 = m u1 at nodes.
struct OneForm {
  Eigen::VectorXd t0, t1, y1;

  static OneForm zero(const Discretization& d);
  double sup() const;
};

inline constexpr double kFibreMass = 1.0;

/// Divergence of a segment 1-form: (1/m_i) sum of outgoing minus incoming.
Eigen::VectorXd divergence(const Discretization& d, const Eigen::VectorXd& seg);
/// Difference quotients (u_b - u_a) / h per segment.
Eigen::VectorXd gradient(const Discretization& d, const Eigen::VectorXd& u);
/// d* beta in both modes.
Field dstar(const Discretization& d, const OneForm& beta, double mass = kFibreMass);
/// Lumped integral sum m_i f_i.
double integrate(const Discretization& d, const Eigen::VectorXd& f);

/// Zero-mean test source near one vertex: in mode 0 e^{-t} minus a multiple
/// of t^2 e^{-t} fixing the integral, in mode 1 e^{-t}; t is the distance
/// from the vertex along its edges.
Field localized_source(const MetricGraph& g, const Discretization& d, std::size_t vertex);

struct Partition {
  std::vector<Eigen::VectorXd> chi;  // one node function per vertex
};

/// chi_v = 1 up to l/2 - 1 along each internal edge from v, 0 beyond l/2 + 1,
/// quintic smoothstep in between; 1 on external edges. Throws EdgeTooShort.
Partition build_partition(const MetricGraph& g, const Discretization& d);

/// A_{vv'} = sum over segments of h dchi_v dchi_v'.
Eigen::MatrixXd stiffness(const Discretization& d, const Partition& p);

struct ObstructionSolution {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||Ax - b|| / max(1, ||b||)
  double bound = 0.0;     // ||x||_inf / ||b||_1
};

/// Minimum-norm solution of A x = b (sum x = 0). Throws NotInRange unless
/// sum b = 0.
ObstructionSolution remove_obstructions(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Factorized direct solver for u'' - mass^2 u = f with Kirchhoff vertices
/// and zero-flux far ends. For mass 0 the mean of f must vanish and u is
/// normalized to zero mean.
class PoissonSolver {
 public:
  PoissonSolver(const Discretization& d, double mass);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PoissonResult {
  Field u;
  OneForm beta;
  double residual = 0.0;  // ||d* beta - f||_inf
};

/// Direct global solve in both modes. Throws NonZeroMean.
PoissonResult graph_poisson(const MetricGraph& g, const Field& f, double mass = kFibreMass);

struct ParametrixOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double delta = -0.1;
  double mass = kFibreMass;
};

struct ParametrixDiagnostics {
  double l_min = 0.0, l_max = 0.0;
  double contraction_ratio = 0.0;  // largest residual ratio over the iteration
  std::vector<double> ratios;
  int iterations = 0;
  double residual = 0.0;
  double beta1_norm = 0.0;           // sup of the local-solve part
  double beta1_weighted_norm = 0.0;  // sup of exp(-delta t) |beta_1|
  std::vector<double> c_v_values;    // coefficients of dchi_v
  double obstruction_residual = 0.0;  // max_v |int chi_v f_2| over iterations
};

struct ParametrixResult {
  OneForm beta;
  ParametrixDiagnostics diagnostics;
};

/// Neumann series sum R^k applied through the parametrix P. Throws
/// NonZeroMean, EdgeTooShort or NoConvergence (ratio >= 0.9).
ParametrixResult parametrix_solve(const MetricGraph& g, const Field& f, const ParametrixOptions& options = {});

struct IterationHistory {
  std::vector<double> norms;
  double fixed_point = 0.0;
  double closed_form = 0.0;
  double contraction = 0.0;  // derivative of the majorant map at the fixed point
  bool converged = false;
};

struct MajorantOptions {
  double c = 1.0;        // decay constant in exp(-c l_min / 2)
  double K = 1.0;        // uniform bound on the parametrix
  int max_iterations = 500;
};

/// Scalar majorant a_{k+1} = err0 + q K a_k (exp(-c l_min/2) + K a_k).
/// Throws Divergence when the increments grow three steps in a row.
IterationHistory model_iteration(double l_min, double err0, double q, const MajorantOptions& options = {});

}  // namespace tsl
