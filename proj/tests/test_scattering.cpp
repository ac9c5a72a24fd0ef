// Forward scattering at the one-wave potential: unitarity, reflectionless-
// ness, the bound state against its closed form, norming constants against
// the Casimir trace formula, squared eigenfunctions, and closure.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>

#include "chlab/scattering.hpp"

using namespace chlab;

namespace {
bool below(const char* name, double val, double thr) {
  std::printf("  %-52s val=%.3e thr=%.3e\n", name, val, thr);
  return std::isfinite(val) && val <= thr;
}
struct Setup {
  Grid g{1024, 80.0, -40.0};
  SolitonParams p{4.0, 1.0};
  SolitonProfile s;
  Setup() : s(build_profile(p, g)) {}
};
}  // namespace

TEST_CASE("spectral parameter map") {
  CHECK_THROWS(lambda_of_k({0.3, 0.0}, 0.0));
  std::complex<double> k(0.7, 0.0);
  std::complex<double> lam = lambda_of_k(k, 2.0);
  CHECK(below("lambda closed form", std::abs(lam - (-(k * k + 0.25) / 2.0)), 1e-15));
}

TEST_CASE("transmission/reflection on a real k-grid") {
  Setup st;
  ScatteringCoeffs sc = scattering_coeffs(st.s.m, st.p.omega, {0.3, 0.7, 1.3, 2.5});
  CHECK(below("unitarity defect", sc.unitarity_defect, 1e-10));
  double maxb = 0;
  for (auto& b : sc.b) maxb = std::max(maxb, std::abs(b));
  CHECK(below("reflection coefficient", maxb, 1e-9));
  CHECK(below("station consistency", sc.station_defect, 1e-10));
  CHECK_THROWS(scattering_coeffs(st.s.m, st.p.omega, {0.0, 0.5}));  // k = 0 degenerate
}

TEST_CASE("discrete spectrum and the trace formula") {
  Setup st;
  DiscreteSpectrum ds = discrete_eigenvalues(st.s.m, st.p.omega);
  REQUIRE(ds.kappa.size() == 1);
  double kap = ds.kappa[0];
  double exact = 0.5 * std::sqrt(1.0 - 2.0 * st.p.omega / st.p.c);
  CHECK(below("bound state location", std::abs(kap - exact), 1e-8));
  CHECK(below("b proportionality (centered wave)", std::abs(ds.b[0] - 1.0), 1e-6));
  CHECK(below("C+ = C- at b = 1", std::abs(ds.Cplus[0] - ds.Cminus[0]) / ds.Cplus[0], 1e-8));

  // i a_dot at the eigenvalue from the total-Casimir trace formula
  double Lambda = std::log(std::pow((1 + 2 * kap) / (1 - 2 * kap), 2));
  double predicted = std::exp(Lambda * kap) / (2.0 * kap);
  double iadot = -ds.adot_im[0];
  CHECK(below("trace formula (fd-limited)", std::abs(iadot - predicted) / predicted, 1e-4));
}

TEST_CASE("squared eigenfunctions solve the third-order relation") {
  Setup st;
  for (double k : {0.4, 1.0}) {
    SquaredEigenfunction se =
        squared_eigenfunction(st.s.m, st.p.omega, {k, 0.0}, +1);
    CHECK(below("local residual", se.residual_local, 1e-10));
  }
  SquaredEigenfunction sm =
      squared_eigenfunction(st.s.m, st.p.omega, {0.6, 0.0}, -1);
  CHECK(below("left-normalized residual", sm.residual_local, 1e-10));
}

TEST_CASE("closure relation on the kernel modes") {
  Setup st;
  std::vector<double> kgrid;
  for (double k = 0.0125; k <= 4.0 + 1e-12; k += 0.0125) kgrid.push_back(k);

  CompletenessResult tr = completeness_residual(st.s, st.s.dphi, kgrid);
  CHECK(below("phi' reconstruction", tr.relative_l2_error, 1e-8));
  CHECK(below("phi' discrete weight", std::abs(tr.discrete_beta - 1.0), 1e-6));
  CHECK(below("phi' scaling leak", std::abs(tr.discrete_gamma), 1e-6));

  double dc = 1e-4;
  SolitonProfile sp = build_profile({st.p.c + dc, st.p.omega}, st.g);
  SolitonProfile sm2 = build_profile({st.p.c - dc, st.p.omega}, st.g);
  Field dcphi(st.g, (sp.phi.v - sm2.phi.v) / (2.0 * dc));
  CompletenessResult sc = completeness_residual(st.s, dcphi, kgrid);
  CHECK(below("d_c phi reconstruction", sc.relative_l2_error, 1e-6));
  CHECK(below("d_c phi discrete weight", std::abs(sc.discrete_gamma - 1.0), 1e-5));
}

TEST_CASE("jost asymptotics at imaginary k survive rescaling") {
  Setup st;
  // at the bound state the two Jost solutions are proportional: check the
  // Wronskian of f+ and f- is tiny relative to their scale there
  double kap = 0.5 * std::sqrt(1.0 - 2.0 * st.p.omega / st.p.c);
  JostSolution fp = jost(st.s.m, st.p.omega, {0.0, kap}, +1);
  JostSolution fm = jost(st.s.m, st.p.omega, {0.0, kap}, -1);
  int mid = fp.fine.n / 2;
  std::complex<double> w = fp.f[mid] * fm.fx[mid] - fp.fx[mid] * fm.f[mid];
  double scale = std::abs(fp.f[mid] * fm.fx[mid]) + std::abs(fp.fx[mid] * fm.f[mid]);
  CHECK(below("degenerate Wronskian at the eigenvalue", std::abs(w) / scale, 1e-6));
}
