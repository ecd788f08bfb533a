#pragma once

// Hyperkahler-rotation coordinates between T*T^2 and (C*)^2, the edge
// cylinder model, sampling of Zero(f), asymptotic-cylinder decay and the
// lift of a vertex curve back to the base R^n.

#include "tsl/lattice.hpp"
#include "tsl/phase_solver.hpp"
#include "tsl/point_cloud.hpp"
#include "tsl/polynomial.hpp"
#include "tsl/tropical_curve.hpp"
#include "tsl/vertex_builder.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace tsl {

struct KahlerData {
  std::vector<RatVec> g;  // symmetric positive definite
  double theta_hat = 1.5707963267948966;

  std::size_t dimension() const { return g.size(); }
  Eigen::MatrixXd metric() const;
};

/// Throws ConfigError unless g is symmetric positive definite (exact leading
/// minors) and theta_hat lies in (0, pi).
void validate_kahler(const KahlerData& k);

KahlerData euclidean_kahler(std::size_t n, double theta_hat);

struct ReducedKahler {
  Eigen::Matrix2d g2;
  double det_root = 1.0;
};

/// Metric on the plane spanned by the frame's first two basis vectors.
ReducedKahler reduce_kahler(const KahlerData& k, const UnimodularFrame& frame);

std::array<Complex, 2> hk_forward(double mu1, double mu2, double th1, double th2, const ReducedKahler& red,
                                  double theta_hat);
/// (mu1, mu2, th1, th2) with angles in [0, 2pi). Throws ZeroCoordinate.
std::array<double, 4> hk_inverse(Complex z1, Complex z2, const ReducedKahler& red, double theta_hat);

/// Straight T^{n-1}-invariant cylinder carrying edge e.
struct CylinderModel {
  std::string edge;
  IntVec direction;                 // primitive, outward from `from`
  std::vector<double> base_point;   // T h(from)
  double phase_const = 0.0;         // in [0, 2pi)
  double length = 0.0;              // T |h(e)|_g, +inf for external edges
};

CylinderModel cylinder_from_edge(const TropicalCurve& curve, const std::string& edge,
                                 const PhaseAssignment& assignment, const KahlerData& kahler, double T);

/// Axis-aligned rectangle in log-moduli coordinates (log|z1|, log|z2|).
struct LogWindow {
  std::array<double, 2> lo{-5.0, -5.0};
  std::array<double, 2> hi{5.0, 5.0};
};

struct SampleGrid {
  int resolution = 64;
  /// Slices per direction are (4r moduli) x (r/4 arguments).
  int moduli() const { return 4 * resolution; }
  int arguments() const { return std::max(4, resolution / 4); }
};

inline constexpr double kSampleResidual = 1e-9;

/// Points of Zero(f) in (C*)^2 found by slicing along both coordinates.
/// Throws EmptyWindow when nothing lands in the window.
std::vector<std::array<Complex, 2>> sample_curve(const LaurentPoly& poly, const LogWindow& window,
                                                 const SampleGrid& grid);

/// |f| / sum |a_m||z^m|
double relative_residual(const LaurentPoly& poly, Complex z1, Complex z2);

struct DecayPoint {
  double R = 0.0;
  double deviation = 0.0;
};

/// Deviation of the end of Zero(f) dual to `facet` from the cylinder
/// z^{m_F} = root. Throws ComponentNotFound if continuation loses the branch.
std::vector<DecayPoint> asymptotic_decay(const LaurentPoly& poly, const NewtonPolygon& polygon,
                                         std::size_t facet, Complex root, const std::vector<double>& R_list);

/// Least-squares slope of log(deviation) against R.
double decay_slope(const std::vector<DecayPoint>& points);

/// A lattice vector m' with <m', n> = 1, reduced against J n.
std::array<long, 2> complementary_exponent(const std::array<long, 2>& normal);

/// Maps (z1, z2) samples to the base: hk_inverse, translate by `shift`,
/// append the fibre moments `p_v`, apply the inverse frame.
PointCloud lift_to_base(const std::vector<std::array<Complex, 2>>& cloud, const UnimodularFrame& frame,
                        const ReducedKahler& red, double theta_hat, const std::vector<double>& p_v,
                        const std::array<double, 2>& shift);

}  // namespace tsl
