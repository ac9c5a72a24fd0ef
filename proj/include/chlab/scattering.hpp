#pragma once
// Forward scattering for the isospectral problem
//   Psi_xx = ( 1/4 + lambda (m + w) ) Psi,     lambda(k) = -(k^2 + 1/4)/w :
// Jost solutions, transmission/reflection coefficients, the discrete
// spectrum k = i kappa_n with 0 < kappa_n < 1/2, squared eigenfunctions, and
// the completeness (closure) machinery built on them.

#include <vector>

#include "chlab/soliton.hpp"
#include "chlab/spectral.hpp"

namespace chlab {

// lambda(k) for the spectral parameter map; w = 0 is rejected.
std::complex<double> lambda_of_k(std::complex<double> k, double omega);

// Jost solution with prescribed exponential asymptotics, integrated by RK4
// on a zero-padding-refined mesh (the potential is band-limited, so the
// refinement is exact). side = +1: f^+ ~ e^{ikx} as x -> +infinity,
// integrated right-to-left; side = -1: f^- ~ e^{-ikx} from the left edge.
// Values and x-derivatives are tracked together; an overall 2^exponent
// rescaling keeps the pair in range at imaginary k.
struct JostSolution {
  CVec   f;         // on the fine mesh, rescaled
  CVec   fx;
  double log_scale; // ln of the removed amplitude factor (0 for real k)
  Grid   fine;      // the refined mesh geometry
};
JostSolution jost(const Field& m, double omega, std::complex<double> k,
                  int side, int refine_factor = 0);  // 0 = auto

struct ScatteringCoeffs {
  std::vector<double>               kgrid;
  std::vector<std::complex<double>> a, b;
  double unitarity_defect;   // max | |a|^2 - |b|^2 - 1 |
  double station_defect;     // max Wronskian disagreement between stations
};
// a, b on a real k-grid (0 must not be on it: the Wronskian normalization
// 1/(2ik) degenerates there).
ScatteringCoeffs scattering_coeffs(const Field& m, double omega,
                                   const std::vector<double>& kgrid);

struct DiscreteSpectrum {
  std::vector<double> kappa;   // ascending
  std::vector<double> adot_im; // Im da/dk at i kappa_n (a is real there)
  std::vector<double> b;       // proportionality f^- = b_n f^+
  std::vector<double> Cplus, Cminus;  // b^{+-1} / (i adot)
};
// Zeros of a(i kappa) on (delta, 1/2 - delta) by sign-change bisection of
// the (real) Wronskian; kappa resolved to 1e-8. max_count caps the search
// (error if more sign changes than that); an empty result is valid.
DiscreteSpectrum discrete_eigenvalues(const Field& m, double omega,
                                      int max_count = 8);

// Squared eigenfunction F = (f^pm)^2 with derivatives in closed form from
// the Jost pair (F' = 2 f f', F'' = 2 (f'^2 + q f^2), F''' = 8 q f f' + 2 q' f^2,
// q = 1/4 + lambda (m + w)), evaluated back on the coarse grid nodes.
// residual_local is the sup-norm defect of the local third-order form of
//   K[m] F = -(1/(2 lambda)) F,      K[m] = (1-d^2)^{-1}(2w + m + d^{-1} m d),
// obtained by applying (1 - d^2) and differentiating once - equivalent on
// the line but free of the inverse operators that are ill-posed on
// non-decaying data.
struct SquaredEigenfunction {
  CVec   F, Fx, Fxx, Fxxx;     // coarse-grid samples
  double residual_local;       // relative sup norm
};
SquaredEigenfunction squared_eigenfunction(const Field& m, double omega,
                                           std::complex<double> k, int side);

// Expand z over the eigenfunction system around a one-soliton profile and
// reconstruct. Discrete part: coefficients against { phi', d_c phi } from the
// pairings with { m_phi, tilde-antiderivative of d_c m } (Gram-corrected:
// the families are not orthogonal, their cross pairing is mu^2/2 with
// mu = d/dc ∫ phi). Continuum part: projection onto (1 - d^2) conj F^+(., k)
// with density -1/(2 pi i k |a|^2), quadrature over kgrid.
struct CompletenessResult {
  Field  reconstruction;
  double relative_l2_error;
  double discrete_gamma;   // d_c phi coefficient
  double discrete_beta;    // phi' coefficient
};
CompletenessResult completeness_residual(const SolitonProfile& s,
                                         const Field& z,
                                         const std::vector<double>& kgrid);

}  // namespace chlab
