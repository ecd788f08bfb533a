#include "tsl/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsl {

int UniPoly::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[static_cast<std::size_t>(k)] != Complex(0.0)) return k;
  return -1;
}

Complex UniPoly::operator()(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex UniPoly::derivative(Complex z) const {
  Complex acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs[k];
  return acc;
}

double UniPoly::magnitude(Complex z) const {
  double acc = 0.0;
  const double r = std::abs(z);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

namespace {

void polish(const UniPoly& p, std::vector<Complex>& roots, int steps) {
  for (auto& r : roots) {
    for (int s = 0; s < steps; ++s) {
      const Complex d = p.derivative(r);
      if (d == Complex(0.0)) break;
      const Complex next = r - p(r) / d;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      if (std::abs(p(next)) > std::abs(p(r))) break;
      r = next;
    }
  }
}

}  // namespace

std::vector<Complex> polynomial_roots(const UniPoly& p, int newton_steps) {
  const int n = p.degree();
  if (n <= 0) return {};
  const auto& c = p.coeffs;

  // Exact zero roots first.
  int low = 0;
  while (c[static_cast<std::size_t>(low)] == Complex(0.0)) ++low;
  std::vector<Complex> roots(static_cast<std::size_t>(low), Complex(0.0));
  const int m = n - low;
  if (m == 0) return roots;
  auto coef = [&](int k) { return c[static_cast<std::size_t>(low + k)]; };

  if (m == 1) {
    roots.push_back(-coef(0) / coef(1));
    return roots;
  }
  if (m == 2) {
    const Complex a = coef(2), b = coef(1), cc = coef(0);
    const Complex disc = std::sqrt(b * b - 4.0 * a * cc);
    const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == Complex(0.0)) {
      roots.push_back(0.0);
      roots.push_back(0.0);
    } else {
      roots.push_back(q / a);
      roots.push_back(cc / q);
    }
    UniPoly reduced{std::vector<Complex>(c.begin() + low, c.begin() + n + 1)};
    std::vector<Complex> tail(roots.end() - 2, roots.end());
    polish(reduced, tail, newton_steps);
    std::copy(tail.begin(), tail.end(), roots.end() - 2);
    return roots;
  }

  // Scale z = rho * w so that the constant and leading coefficients match.
  const double rho = std::pow(std::abs(coef(0)) / std::abs(coef(m)), 1.0 / m);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
  const Complex lead = coef(m) * std::pow(rho, m);
  for (int k = 0; k < m; ++k) comp(0, m - 1 - k) = -coef(k) * std::pow(rho, k) / lead;
  for (int k = 1; k < m; ++k) comp(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> tail;
  for (int k = 0; k < m; ++k) tail.push_back(rho * es.eigenvalues()(k));
  UniPoly reduced{std::vector<Complex>(c.begin() + low, c.begin() + n + 1)};
  polish(reduced, tail, newton_steps);
  roots.insert(roots.end(), tail.begin(), tail.end());
  return roots;
}

std::vector<Complex> from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{1.0};
  for (const auto& r : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

Complex ipow(Complex z, long k) {
  if (k < 0) return 1.0 / ipow(z, -k);
  Complex result = 1.0;
  Complex base = z;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

Complex LaurentPoly::operator()(Complex z1, Complex z2) const {
  Complex acc = 0.0;
  for (const auto& [m, a] : coeffs) acc += a * ipow(z1, m[0]) * ipow(z2, m[1]);
  return acc;
}

std::array<Complex, 2> LaurentPoly::log_gradient(Complex z1, Complex z2) const {
  std::array<Complex, 2> g{0.0, 0.0};
  for (const auto& [m, a] : coeffs) {
    const Complex t = a * ipow(z1, m[0]) * ipow(z2, m[1]);
    g[0] += static_cast<double>(m[0]) * t;
    g[1] += static_cast<double>(m[1]) * t;
  }
  return g;
}

double LaurentPoly::magnitude(Complex z1, Complex z2) const {
  double acc = 0.0;
  const double r1 = std::abs(z1), r2 = std::abs(z2);
  for (const auto& [m, a] : coeffs) acc += std::abs(a) * std::pow(r1, m[0]) * std::pow(r2, m[1]);
  return acc;
}

Exponent LaurentPoly::min_exponent() const {
  Exponent lo{std::numeric_limits<long>::max(), std::numeric_limits<long>::max()};
  for (const auto& [m, a] : coeffs) {
    lo[0] = std::min(lo[0], m[0]);
    lo[1] = std::min(lo[1], m[1]);
  }
  return lo;
}

Exponent LaurentPoly::max_exponent() const {
  Exponent hi{std::numeric_limits<long>::min(), std::numeric_limits<long>::min()};
  for (const auto& [m, a] : coeffs) {
    hi[0] = std::max(hi[0], m[0]);
    hi[1] = std::max(hi[1], m[1]);
  }
  return hi;
}

int LaurentPoly::total_degree() const {
  // Degree after shifting the support into the positive quadrant.
  const Exponent lo = min_exponent();
  long d = 0;
  for (const auto& [m, a] : coeffs) d = std::max(d, (m[0] - lo[0]) + (m[1] - lo[1]));
  return static_cast<int>(d);
}

UniPoly LaurentPoly::slice(int fixed_axis, Complex value) const {
  const int free_axis = 1 - fixed_axis;
  const Exponent lo = min_exponent();
  const Exponent hi = max_exponent();
  UniPoly p;
  p.coeffs.assign(static_cast<std::size_t>(hi[free_axis] - lo[free_axis] + 1), 0.0);
  for (const auto& [m, a] : coeffs)
    p.coeffs[static_cast<std::size_t>(m[free_axis] - lo[free_axis])] += a * ipow(value, m[fixed_axis]);
  return p;
}

}  // namespace tsl
