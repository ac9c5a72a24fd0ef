#pragma once
// Multi-wave machinery: well-separated superpositions, the exact parametric
// N-wave solution driven by scattering data, and the end-to-end train
// stability experiment (evolve + modulation-track + tail audit).

#include <vector>

#include "chlab/modulation.hpp"
#include "chlab/soliton.hpp"

namespace chlab {

// Sum of profiles at ordered positions; gaps below 10 are rejected, gaps
// below 2x the slowest decay scale get an overlap warning in the result.
struct Superposition {
  Field  u;
  double max_pairwise_overlap;  // sup_x of the smallest two tail products
  bool   overlap_warning;
};
Superposition superposition(const std::vector<SolitonParams>& waves,
                            const std::vector<double>& positions,
                            const Grid& g);

// Seeded band-limited noise (modes <= min(n/8, 64)) under a width-20
// envelope at `center`, scaled to H^1 size eps. Deterministic in the seed.
Field seeded_noise(const Grid& g, double center, double eps, unsigned seed);

// Exact N-wave (N <= 2) from discrete data kappa_n (speeds c_n = 2w/(1-4k^2))
// and norming constants C_n^+(0), evolved through
//   C_n^+(t) = C_n^+(0) exp( 4 w kappa_n t / (1 - 4 kappa_n^2) ).
// Evaluation: u(t,x) = (w/2) ∫ e^{-|x - g|} / g_s ds - w over s = ln(xi),
// where g(s) = ln ∫_0^{e^s} B(y)^{-2} dy and
//   B(y) = 1 - sum_{n,p} (C_n^+(t) y^{-2 kappa_n}/(kappa_n + 1/2)) A_{np}(y),
// with A = (delta_{pn} + C_n^+(t) y^{-2 kappa_n}/(kappa_n + kappa_p))^{-1}.
// (The matrix inverse is forced by positivity: the non-inverted reading has
// a non-integrable singularity.) The s-mesh is refined until u changes by
// less than 1e-6; disagreement above 1e-4 between the last two refinements
// is an error.
struct NSolitonSpec {
  double omega;
  std::vector<double> kappa;
  std::vector<double> Cplus0;
};
Field exact_n_soliton(const NSolitonSpec& spec, double t, const Grid& g);

// Evolve a perturbed ordered train (speeds and positions both ascending, so
// faster waves sit ahead and gaps grow; anything else would collide and is
// rejected), track modulation parameters, and audit speeds, residual growth,
// and tail mass. A tube exit during tracking is reported as failure, not a
// crash.
struct TrainOutcome {
  bool                 stayed_in_tube;
  double               exit_time;        // NaN if it never exited
  ModulationTrack      tracked;
  std::vector<double>  final_c;
  double               max_residual_h1;
  double               tail_mass_behind; // H^1 mass 10 behind the last wave
};
struct TrainConfig {
  std::vector<SolitonParams> waves;      // ascending speeds
  std::vector<double>        positions;  // ascending, fastest last... ordered
  double t_end   = 20.0;
  double dt      = 1e-3;
  double epsilon = 0.0;                  // H^1 size of the seeded perturbation
  unsigned seed  = 2026;
};
TrainOutcome train_experiment(const TrainConfig& cfg, const Grid& g);

}  // namespace chlab
