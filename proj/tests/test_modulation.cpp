// Modulation machinery: the smoothed half-line weight's defining properties,
// parameter recovery from manufactured decompositions, tracking along a
// perturbed run, and the weighted functionals on an exact travelling wave.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "chlab/dynamics.hpp"
#include "chlab/modulation.hpp"
#include "chlab/multisoliton.hpp"

using namespace chlab;

namespace {
bool below(const char* name, double val, double thr) {
  std::printf("  %-52s val=%.3e thr=%.3e\n", name, val, thr);
  return std::isfinite(val) && val <= thr;
}
}  // namespace

TEST_CASE("half-line weight properties") {
  CHECK_THROWS(psi_weight(0.5));
  PsiWeight psi = psi_weight(4.0);
  CHECK(below("Psi(0) = 1/2", std::abs(psi.value(0.0) - 0.5), 1e-12));
  double sym = 0, pos = 1e300, curv = 0, tail = 0;
  for (double x = -24.0; x <= 24.0; x += 0.125) {
    sym = std::max(sym, std::abs(psi.value(x) + psi.value(-x) - 1.0));
    pos = std::min(pos, psi.slope(x));
    double fd = (psi.slope(x + 5e-4) - psi.slope(x - 5e-4)) / 1e-3;
    curv = std::max(curv, std::abs(fd) - psi.slope(x) / psi.K);
  }
  for (double x = -24.0; x <= -psi.K * 1.0001; x += 0.5)
    tail = std::max(tail,
                    std::abs(psi.value(x) - psi.C_g * std::exp(x / psi.K)));
  CHECK(below("Psi(x) + Psi(-x) = 1", sym, 1e-12));
  CHECK(pos > 0.0);
  CHECK(below("|Psi''| <= Psi'/K", curv, 1e-8));
  CHECK(below("exact exponential left tail", tail, 1e-11));
}

TEST_CASE("decompose recovers a manufactured state") {
  Grid g(1024, 80.0, -40.0);
  double omega = 1.0;
  SolitonProfile s = build_profile({4.0, omega}, g, 3.7);
  ModulationState exact = decompose(s.phi, omega, {3.9}, {3.2});
  CHECK(below("recovered speed", std::abs(exact.c[0] - 4.0), 1e-8));
  CHECK(below("recovered center", std::abs(exact.x[0] - 3.7), 1e-8));
  CHECK(below("residual on exact input", h1_norm(exact.v), 1e-7));
  CHECK(below("orthogonality defect", exact.final_residual, 1e-10));

  // small perturbation: parameters move by O(||v||), v stays orthogonal
  Field noise = seeded_noise(g, 3.7, 0.02, 5u);
  Field u(g, s.phi.v + noise.v);
  ModulationState st = decompose(u, omega, {4.0}, {3.7});
  CHECK(below("perturbed speed shift", std::abs(st.c[0] - 4.0), 0.05));
  CHECK(below("perturbed center shift", std::abs(st.x[0] - 3.7), 0.05));
  CHECK(below("orthogonality defect", st.final_residual, 1e-10));
}

TEST_CASE("decompose resolves a two-wave superposition") {
  Grid g(2048, 160.0, -80.0);
  double omega = 1.0;
  Superposition sup = superposition({{3.0, omega}, {5.0, omega}}, {-15.0, 15.0}, g);
  ModulationState st = decompose(sup.u, omega, {2.9, 5.2}, {-14.0, 15.5});
  CHECK(below("first speed", std::abs(st.c[0] - 3.0), 1e-4));
  CHECK(below("second speed", std::abs(st.c[1] - 5.0), 1e-4));
  CHECK(below("first center", std::abs(st.x[0] + 15.0), 1e-4));
  CHECK(below("second center", std::abs(st.x[1] - 15.0), 1e-4));
}

TEST_CASE("tube exit is an error, not a silent answer") {
  Grid g(512, 80.0, -40.0);
  Field junk(g);
  for (int i = 0; i < g.n; ++i) junk.v[i] = 0.05 * std::sin(0.3 * g.x(i));
  CHECK_THROWS(decompose(junk, 1.0, {4.0}, {0.0}));
}

TEST_CASE("tracking a lightly perturbed wave") {
  Grid g(512, 80.0, -40.0);
  double omega = 1.0;
  SolitonProfile s = build_profile({4.0, omega}, g, -10.0);
  Field u0(g, s.phi.v + seeded_noise(g, -10.0, 0.01 * h1_norm(s.phi), 2026u).v);
  Trajectory tr = evolve(u0, omega, 2.0);
  ModulationTrack mt = track(tr, omega, {4.0}, {-10.0});
  REQUIRE(mt.times.size() == tr.times.size());
  double cerr = 0, vmax = 0;
  for (size_t i = 0; i < mt.times.size(); ++i) {
    cerr = std::max(cerr, std::abs(mt.c[i][0] - 4.0));
    vmax = std::max(vmax, mt.vnorm_h1[i]);
  }
  CHECK(below("speed stays near the family", cerr, 0.05));
  CHECK(below("residual stays perturbation-sized", vmax, 0.2));
}

TEST_CASE("functional hypotheses are enforced") {
  Grid g(512, 80.0, -40.0);
  double omega = 1.0;
  SolitonProfile s = build_profile({4.0, omega}, g, -10.0);
  Trajectory tr = evolve(s.phi, omega, 0.2);
  PeakTrack pk = peak_speed(tr);
  FunctionalOptions bad;  // (1 - 0.5)^2 * 4 = 1 < 2w: outside the regime
  CHECK_THROWS(functionals(tr, pk.times, pk.positions, omega, 4.0, 0.2, bad));
  FunctionalOptions small_K;
  small_K.alpha = 0.25;
  small_K.K = 2.0;  // below the sqrt((1-a)^2 c / ((1-a)^2 c - 2w)) = 3 bound
  CHECK_THROWS(functionals(tr, pk.times, pk.positions, omega, 4.0, 0.2, small_K));
}

TEST_CASE("functionals ride along an exact travelling wave") {
  Grid g(1024, 80.0, -40.0);
  double omega = 1.0;
  SolitonProfile s = build_profile({4.0, omega}, g, -15.0);
  Trajectory tr = evolve(s.phi, omega, 5.0);
  PeakTrack pk = peak_speed(tr);
  FunctionalOptions fo;
  fo.alpha = 0.25;
  FunctionalSeries fs = functionals(tr, pk.times, pk.positions, omega, 4.0,
                                    5.0, fo);
  auto spread = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) { lo = std::min(lo, x); hi = std::max(hi, x); }
    return hi - lo;
  };
  // in the co-moving frame every functional is time-independent
  CHECK(below("E shifted constant", spread(fs.E_right_shifted) / fs.E_right_shifted[0], 1e-6));
  CHECK(below("F shifted constant", spread(fs.F_right_shifted) / std::abs(fs.F_right_shifted[0]), 1e-6));
  CHECK(below("E_R constant", spread(fs.E_R) / fs.E_R[0], 1e-6));
  CHECK(below("mass split drift", fs.E_total_drift / (fs.E_R[0] + fs.E_L[0]), 1e-10));
}

TEST_CASE("localization and tail fits on the profile") {
  Grid g(1024, 80.0, -40.0);
  SolitonProfile s = build_profile({4.0, 1.0}, g);
  double r1 = localization_radius(s.phi, 0.0, 1e-2);
  double r2 = localization_radius(s.phi, 0.0, 1e-4);
  CHECK(r1 < r2);
  // H^1 tail mass of the wave decays at the profile rate
  double rate = right_tail_decay(s.phi, 0.0, 5.0, 25.0, 4.0);
  double twok = std::sqrt(1.0 - 2.0 / 4.0);
  CHECK(below("tail decay vs sqrt(1-2w/c)", std::abs(rate - twok) / twok, 0.05));
}
