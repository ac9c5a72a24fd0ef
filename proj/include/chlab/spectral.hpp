#pragma once
// Periodic pseudo-spectral primitives on a uniform grid: FFT differentiation,
// Helmholtz solves, the skew transport operator -d/dx (1 - d^2/dx^2)^{-1},
// antiderivatives of decaying integrands, and the quadrature/norm helpers the
// rest of the library is built on.

#include <complex>
#include <Eigen/Dense>

namespace chlab {

using Vec  = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat  = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Uniform periodic grid on [x0, x0 + length). n must be a power of two and
// at least 64 so zero-padding refinement and dealiasing stay exact.
struct Grid {
  int    n;
  double length;
  double x0;

  Grid(int n, double length, double x0);
  double h() const { return length / n; }
  double x(int i) const { return x0 + i * h(); }
  Vec    nodes() const;
  // wavenumber of rfft mode j = 0 .. n/2
  double k(int j) const;
  // signed distance from x to ref, wrapped into [-length/2, length/2)
  double wrap(double x, double ref = 0.0) const;
  bool   operator==(const Grid& o) const;
};

// Real field sampled on a grid. A thin aggregate: the numerics live in free
// functions so compositions read like the operator calculus they implement.
struct Field {
  Grid grid;
  Vec  v;

  explicit Field(const Grid& g);
  Field(const Grid& g, Vec values);  // rejects non-finite entries
  double& operator[](int i) { return v[i]; }
  double  operator[](int i) const { return v[i]; }
  int     n() const { return grid.n; }
};

// Half-complex spectrum (size n/2 + 1) of a real field, and its inverse.
CVec  rfft(const Field& f);
Field irfft(const Grid& g, const CVec& spec);

// Spectral derivative of order 1..3 (order 0 returns a copy). Odd orders
// zero the Nyquist mode so the result is the derivative of the unique
// band-limited interpolant. Orders above 3 are rejected.
Field derivative(const Field& f, int order = 1);

// (1 - d^2/dx^2)^{-1} f, diagonal in Fourier space: division by 1 + k^2.
Field helmholtz_inverse(const Field& f);

// J f = -d/dx (1 - d^2/dx^2)^{-1} f; exactly skew-adjoint for the grid
// quadrature, annihilates constants.
Field apply_skew_J(const Field& f);

// Mean-removed periodic antiderivative pinned to zero at the left endpoint.
// For a decaying integrand this reproduces int_{-inf}^x f to spectral
// accuracy. A mean above mean_tol * max|f| means the primitive could not be
// periodic; that is an error ("non-decaying integrand"), since silently
// subtracting a large ramp would corrupt downstream operator identities.
// The removed mean is always reported through removed_mean when non-null.
Field antiderivative(const Field& f, double* removed_mean = nullptr,
                     double mean_tol = 1e-8);

// Sharp Fourier cutoff: zero all modes with index > max_mode.
Field band_limit(const Field& f, int max_mode);

// Product with the 2/3-rule: both factors and the result truncated at n/3,
// so no aliased image of the quadratic interaction survives.
Field dealiased_product(const Field& a, const Field& b);

// Band-limited resample onto a grid refined by `factor` (zero padding the
// spectrum); exact for band-limited data. Used to feed dense ODE meshes.
Vec refine(const Field& f, int factor);

// Periodic trapezoid quadrature (= rectangle rule) and derived norms.
double integrate(const Field& f);
double inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
double h1_norm(const Field& f);                       // sqrt(∫ f^2 + f_x^2)
double weighted_h1_norm(const Field& f, double a);    // sqrt(∫ e^{2ax}(f^2 + f_x^2))
// Same H^1 integrand restricted to the periodic arc from xa to xb (sharp
// indicator at grid nodes; the derivative is still global-spectral).
double h1_norm_window(const Field& f, double xa, double xb);

}  // namespace chlab
