// Multi-wave constructions: superpositions, the scattering-data parametric
// solution against the profile family, and the end-to-end ordered-train
// experiment.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "chlab/multisoliton.hpp"
#include "chlab/spectral.hpp"

using namespace chlab;

namespace {
bool below(const char* name, double val, double thr) {
  std::printf("  %-52s val=%.3e thr=%.3e\n", name, val, thr);
  return std::isfinite(val) && val <= thr;
}
double shift_min_h1(const Field& u, const SolitonParams& p) {
  const Grid& g = u.grid;
  int imax = 0;
  for (int i = 1; i < g.n; ++i)
    if (u.v[i] > u.v[imax]) imax = i;
  double best = 1e300;
  for (double s = g.x(imax) - g.h(); s <= g.x(imax) + g.h(); s += g.h() / 16) {
    SolitonProfile ph = build_profile(p, g, s);
    best = std::min(best, h1_norm(Field(g, u.v - ph.phi.v)));
  }
  return best;
}
}  // namespace

TEST_CASE("superposition basics") {
  Grid g(2048, 160.0, -80.0);
  double omega = 1.0;
  Superposition one = superposition({{4.0, omega}}, {0.0}, g);
  SolitonProfile s = build_profile({4.0, omega}, g);
  CHECK(below("N=1 equals the profile", (one.u.v - s.phi.v).cwiseAbs().maxCoeff(), 1e-14));

  Superposition two = superposition({{3.0, omega}, {5.0, omega}}, {-15.0, 15.0}, g);
  SolitonProfile s1 = build_profile({3.0, omega}, g, -15.0);
  SolitonProfile s2 = build_profile({5.0, omega}, g, 15.0);
  Field m1(g, s1.phi.v - derivative(s1.phi, 2).v);
  double cross = std::abs(inner(m1, s2.phi));
  CHECK(below("H1 cross-term of the pair", cross, 1e-5));
  // value at each crest is its own wave plus the other's exponential tail
  int i1 = (int)std::round((-15.0 + 80.0) / g.h());
  int i2 = (int)std::round((15.0 + 80.0) / g.h());
  CHECK(below("crest value 1", std::abs(two.u.v[i1] - (3.0 - 2 * omega)), 1e-4));
  CHECK(below("crest value 2", std::abs(two.u.v[i2] - (5.0 - 2 * omega)), 1e-4));

  CHECK_THROWS(superposition({{3.0, omega}, {5.0, omega}}, {0.0, 8.0}, g));
}

TEST_CASE("seeded noise contract") {
  Grid g(1024, 80.0, -40.0);
  Field a = seeded_noise(g, 0.0, 0.01, 42u);
  Field b = seeded_noise(g, 0.0, 0.01, 42u);
  Field c = seeded_noise(g, 0.0, 0.01, 43u);
  CHECK((a.v - b.v).norm() == 0.0);
  CHECK((a.v - c.v).norm() != 0.0);
  CHECK(below("H1 size calibrated", std::abs(h1_norm(a) - 0.01), 1e-12));
  CVec spec = rfft(a);
  double high = 0;
  for (int j = g.n / 8 + 1; j <= g.n / 2; ++j) high = std::max(high, std::abs(spec[j]));
  CHECK(below("band limit at n/8", high, 1e-15));
}

TEST_CASE("parametric construction: one wave") {
  Grid g(2048, 240.0, -120.0);
  double omega = 1.0;
  double kap = 0.5 * std::sqrt(1.0 - 2.0 / 4.0);  // the c = 4 member
  NSolitonSpec spec{omega, {kap}, {1.0}};
  Field u = exact_n_soliton(spec, 0.0, g);
  double rel = shift_min_h1(u, {4.0, omega}) / h1_norm(u);
  CHECK(below("H1 distance to the profile family", rel, 1e-3));

  // the time dependence of the norming constant is rigid transport
  Field ut = exact_n_soliton(spec, 2.0, g);
  double rel_t = shift_min_h1(ut, {4.0, omega}) / h1_norm(ut);
  CHECK(below("still on the family at t = 2", rel_t, 1e-3));
  int i0 = 0, it = 0;
  for (int i = 1; i < g.n; ++i) {
    if (u.v[i] > u.v[i0]) i0 = i;
    if (ut.v[i] > ut.v[it]) it = i;
  }
  CHECK(below("crest moved by c t", std::abs((g.x(it) - g.x(i0)) - 8.0), 2 * g.h()));
}

TEST_CASE("parametric construction guards") {
  Grid g(1024, 160.0, -80.0);
  CHECK_THROWS(exact_n_soliton({1.0, {0.2, 0.3, 0.4}, {1, 1, 1}}, 0.0, g));  // N = 3
  CHECK_THROWS(exact_n_soliton({1.0, {0.7}, {1.0}}, 0.0, g));  // kappa >= 1/2
  CHECK_THROWS(exact_n_soliton({1.0, {0.3}, {-1.0}}, 0.0, g)); // C+ <= 0
}

TEST_CASE("unperturbed ordered train stays on the family") {
  Grid g(2048, 320.0, -160.0);
  double omega = 1.0;
  TrainConfig tc;
  tc.waves = {{3.0, omega}, {5.0, omega}};
  tc.positions = {-30.0, 0.0};
  tc.t_end = 20.0;
  tc.epsilon = 0.0;
  TrainOutcome out = train_experiment(tc, g);
  REQUIRE(out.stayed_in_tube);
  CHECK(std::isnan(out.exit_time));
  CHECK(below("final speed 1 near family", std::abs(out.final_c[0] - 3.0), 0.02));
  CHECK(below("final speed 2 near family", std::abs(out.final_c[1] - 5.0), 0.02));
  CHECK(out.final_c[0] < out.final_c[1]);
  CHECK(below("max manifold distance", out.max_residual_h1, 5e-3));

  // gaps open at the speed difference
  size_t last = out.tracked.times.size() - 1;
  double gap0 = out.tracked.x[0][1] - out.tracked.x[0][0];
  double gapT = out.tracked.x[last][1] - out.tracked.x[last][0];
  double opened = (gapT - gap0) / (out.tracked.times[last] - out.tracked.times[0]);
  CHECK(below("gap growth rate vs c2 - c1", std::abs(opened - 2.0), 0.1));
  CHECK(below("tail mass behind the train", out.tail_mass_behind, 0.1));
}

TEST_CASE("mis-ordered trains are rejected") {
  Grid g(2048, 320.0, -160.0);
  TrainConfig tc;
  tc.waves = {{5.0, 1.0}, {3.0, 1.0}};  // faster wave behind: collision course
  tc.positions = {-30.0, 0.0};
  CHECK_THROWS(train_experiment(tc, g));
}
