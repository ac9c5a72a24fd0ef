#pragma once
// Time integration of the nonlocal transport form of the flow:
//   u_t = -u u_x - d/dx (1 - d^2)^{-1} ( u^2 + (1/2) u_x^2 + 2w u ),
// with classical RK4 in time and pseudo-spectral space derivatives.

#include <functional>
#include <vector>

#include "chlab/spectral.hpp"

namespace chlab {

struct EvolveOptions {
  double dt              = 1e-3;
  int    snapshot_stride = 100;   // record every this many steps (plus final)
  bool   dealias         = true;  // 2/3-rule products
  // Abort thresholds: amplitude doubling signals imminent breaking for this
  // equation family; the CFL guard catches a dt that outran the transport.
  double blowup_factor = 2.0;
  double cfl_safety    = 0.5;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field>  states;
  std::vector<double> E;        // (1/2) ∫ u^2 + u_x^2
  std::vector<double> F;        // (1/2) ∫ u^3 + u u_x^2 + 2w u^2
  std::vector<double> casimir;  // ∫ sqrt((m+w)/w) - 1, NaN once m+w <= 0
};

// Right-hand side above. Also exposed for convergence studies.
Field ch_rhs(const Field& u, double omega, bool dealias = true);

Trajectory evolve(const Field& u0, double omega, double t_end,
                  const EvolveOptions& opt = {});

// Crest trajectory and its least-squares speed: per snapshot the arg max is
// refined by a parabolic fit through three nodes, then unwrapped across the
// periodic seam before fitting x(t) = x0 + s t.
struct PeakTrack {
  std::vector<double> times;
  std::vector<double> positions;  // unwrapped
  double speed;
  double r_squared;
};
PeakTrack peak_speed(const Trajectory& tr);

}  // namespace chlab
