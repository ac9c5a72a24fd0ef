#pragma once
// Modulation decomposition u = sum_j phi_{c_j}(. - x_j) + v with the
// orthogonality <v, (1-d^2) R_j> = <v, (1-d^2) d/dx R_j> = 0, parameter
// tracking along trajectories, and the weighted energy functionals whose
// near-monotonicity drives the stability argument.

#include <vector>

#include "chlab/dynamics.hpp"
#include "chlab/soliton.hpp"

namespace chlab {

// Smoothed half-line weight. A compactly supported even mollifier rho
// (normalized bump exp(-1/(1-x^2)) on (-1,1), mass 1/2) is convolved with
// e^{-|x|} to give g; Psi_K(x) = ∫_{-inf}^{x/K} g. Then Psi_K' = g(x/K)/K > 0,
// Psi_K(x) + Psi_K(-x) = 1, exact tails C_g e^{x/K} for x <= -K, and
// |Psi_K''| <= Psi_K'/K pointwise. K >= 1 required.
struct PsiWeight {
  double K;
  double C_g;                       // ∫ rho(y) e^y dy (tail constant)
  double value(double x) const;     // Psi_K(x)
  double slope(double x) const;     // Psi_K'(x)
};
PsiWeight psi_weight(double K);

struct ModulationState {
  std::vector<double> c, x;   // per wave
  Field  v;                   // residual
  int    iterations;
  double final_residual;      // max orthogonality defect
};

// Newton solve of the 2N orthogonality conditions in (c_j, x_j), Jacobian by
// forward differences (step 1e-6), residual tolerance 1e-10, at most 50
// iterations - exceeding them means u left the modulation tube and is an
// error. Initial guesses must be ordered x_1 < x_2 < ... .
ModulationState decompose(const Field& u, double omega,
                          std::vector<double> c0, std::vector<double> x0);

// decompose along a trajectory with warm starts; reports finite-difference
// parameter velocities on the snapshot times.
struct ModulationTrack {
  std::vector<double>              times;
  std::vector<std::vector<double>> c, x;      // [snapshot][wave]
  std::vector<std::vector<double>> cdot, xdot_minus_c;
  std::vector<double>              vnorm_h1;
};
ModulationTrack track(const Trajectory& tr, double omega,
                      std::vector<double> c0, std::vector<double> x0);

// Weighted functionals of a snapshot, all built on Psi_K:
//   E_{x0,t0}(t)   = ∫ (u^2+u_x^2) Psi_K(x - x(t) - x0 - alpha (x(t0) - x(t)))
//   F_{x0,t0}(t)   = (1/2)∫ (u^3+u u_x^2+2w u^2) Psi_K(x - x(t) + x0 - alpha(...))
//   E_R / E_L      = (1/2)∫ (u^2+u_x^2) Psi_K / (1 - Psi_K) at offset x0
//   F_R            = the F-integrand against Psi_K at offset x0.
// x(t) is the tracked crest. Requires (1-alpha)^2 c1 > 2w and
// K > sqrt((1-alpha)^2 c1 / ((1-alpha)^2 c1 - 2w)); the error names the bound.
struct FunctionalOptions {
  double K     = 4.0;
  double alpha = 0.5;
  double x0    = 10.0;
};
struct FunctionalSeries {
  std::vector<double> times;
  std::vector<double> E_right_shifted;  // E_{x0,t0}
  std::vector<double> F_right_shifted;  // F_{x0,t0}
  std::vector<double> E_R, E_L, F_R;
  double E_total_drift;                 // max |E_R + E_L - E|
};
FunctionalSeries functionals(const Trajectory& tr,
                             const std::vector<double>& crest_times,
                             const std::vector<double>& crest_positions,
                             double omega, double c1, double t0,
                             const FunctionalOptions& opt = {});

// Smallest radius r with ||u||_{H^1(|x - x_c| > r)} <= eps ||u||_{H^1}.
double localization_radius(const Field& u, double x_center, double eps);

// Fit of log H^1-mass in sliding right tails [x_c + r, x_c + r + width]:
// returns the decay rate per unit r (positive = decaying).
double right_tail_decay(const Field& u, double x_center, double r_min,
                        double r_max, double width);

// Half-line masses along a tracked trajectory: per snapshot,
//   u_right  = ||u||_{H^1(x > 2 w t)}          (ahead of the linear cone)
//   v_right  = ||v||_{H^1(x > x_1(t) - 10)}    (residual near/right of crest)
// with v re-solved from the tracked parameters as warm starts. Windows are
// clipped to the box's right edge.
struct TailSeries {
  std::vector<double> times, u_right, v_right;
};
TailSeries right_tail_series(const Trajectory& tr, const ModulationTrack& mt,
                             double omega);

}  // namespace chlab
