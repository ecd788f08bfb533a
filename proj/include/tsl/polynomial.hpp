#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

namespace tsl {

using Complex = std::complex<double>;

/// Univariate polynomial, coefficients in ascending degree.
struct UniPoly {
  std::vector<Complex> coeffs;

  int degree() const;
  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
  /// Sum of |c_k| |z|^k, the natural scale for backward-error residuals.
  double magnitude(Complex z) const;
};

/// All complex roots with multiplicity. Degree 1 and 2 use closed forms,
/// higher degrees a scaled companion matrix followed by `newton_steps` Newton
/// polish steps. Trailing exact-zero leading coefficients are dropped.
std::vector<Complex> polynomial_roots(const UniPoly& p, int newton_steps = 1);

/// Monic polynomial prod (z - r_i), ascending coefficients.
std::vector<Complex> from_roots(const std::vector<Complex>& roots);

using Exponent = std::array<long, 2>;

/// Complex integer power by repeated squaring; z^0 = 1 even for z = 0.
Complex ipow(Complex z, long k);

/// Laurent polynomial in two variables on the lattice Z^2.
struct LaurentPoly {
  std::map<Exponent, Complex> coeffs;

  Complex operator()(Complex z1, Complex z2) const;
  /// z1 * df/dz1 and z2 * df/dz2.
  std::array<Complex, 2> log_gradient(Complex z1, Complex z2) const;
  double magnitude(Complex z1, Complex z2) const;
  Exponent min_exponent() const;
  Exponent max_exponent() const;
  int total_degree() const;

  /// Restriction to z_{axis} = value as a polynomial in the other variable,
  /// shifted so the lowest exponent is zero.
  UniPoly slice(int fixed_axis, Complex value) const;
};

}  // namespace tsl
