#pragma once
// Dense realizations of the periodic calculus for operator assembly: the
// analytic Fourier differentiation matrix, Helmholtz resolvent, sharp band
// projector, banded multipliers, and an antiderivative matrix whose adjoint
// defect is exactly the line one. Everything here is n x n dense; callers
// keep n <= 2048.

#include "chlab/spectral.hpp"

namespace chlab {

// Antisymmetric spectral differentiation matrix: D_{jl} = (pi/L) (-1)^{j-l}
// cot(pi (j-l)/n) off the diagonal, zero on it. Identical to conjugating
// diag(ik, Nyquist zeroed) by the DFT.
Mat diff_matrix(const Grid& g);

// (I - D^2)^{-1}, symmetric positive definite (eigenvalues 1/(1+k^2), with
// the Nyquist pair mapped to 1 because D zeroes it).
Mat helmholtz_matrix(const Grid& g);

// Orthogonal projector onto modes |j| <= n/denom (real symmetric circulant).
// denom = 3 is the multiplier band; denom = 6 is the residual test class.
Mat band_projector(const Grid& g, int denom = 3);

// Banded multiplier P diag(P f) P. Multiplication is the only place aliasing
// can enter a dense operator; projecting both the coefficient and the factor
// makes the matrix Leibniz rule D M(f) - M(f) D = M(Df) exact whenever the
// coefficient's spectrum fits under n/6, which every profile here satisfies.
Mat banded_multiplier(const Grid& g, const Field& f);

// Antiderivative int_{x0}^x f realized as (exact spectral primitive of the
// mean-free part, pinned to zero at the left node) + mean(f) * r, where r is
// the sawtooth x - x0 mollified by a Gaussian of width sigma = 1.2. For a
// decaying integrand this is int_{-inf}^x f to spectral accuracy on the
// bulk of the box; crucially the saturation ramp re-descends *smoothly*
// inside the seam zone, so downstream spectral derivatives see no jump and
// produce no global ringing (a hard step here poisons every composite
// operator with O(1) Dirichlet-kernel junk).
Mat antiderivative_matrix(const Grid& g);

// Mean-removal compression Pi = I - (h/L) 11^T (kept for the diagnostics
// that only need the constant channel removed).
Mat mean_compression(const Grid& g);

// Smooth centered test-class window: 1 on |x - xc| <= L/4 (xc the box
// center), Gaussian falloff with width L/28 outside, ~1e-11 by the seam.
Mat window_compression(const Grid& g);

// Operator 2-norm (largest singular value) and the test-class relative
// residual used by the identity checks. The identities hold for smooth
// decaying functions on the line; the box realization adds exactly three
// junk channels that the metric quotients:
//   - seam junk (saturation tails, periodization): killed by the window W
//     on both sides;
//   - the basing constant of the antiderivative (the box pins primitives at
//     the seam node instead of -infinity, shifting every composite by a
//     multiple of the constant vector): killed on the output side by
//     subtracting the window-weighted mean;
//   - band-edge noise (the banded multipliers only close under products for
//     spectra below n/3, and the assembled adjoints carry a pinned-node
//     spike): killed by restricting both sides to modes |j| <= n/6.
// Concretely, with q = diag(W)/sum(W):
//   || P6 W (I - 1 q^T) (X - Y) W P6 || / || P6 W (I - 1 q^T) X W P6 ||.
double op_norm(const Mat& m);
double windowed_rel_residual(const Grid& g, const Mat& x, const Mat& y);

// Line primitive int_{x0}^x f for a decaying (not necessarily mean-zero)
// integrand: cumulative trapezoid plus Euler-Maclaurin endpoint corrections
// with spectral derivatives of f. O(h^6); the output need not be periodic,
// so unlike antiderivative() there is no mean restriction.
Field line_cumulative(const Field& f);

}  // namespace chlab
