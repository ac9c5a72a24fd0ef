// Dense linearized/recursion operators: eigenrelations on the wave, the
// intertwining residuals on the windowed test class, the weighted spectrum
// with its two-dimensional neutral kernel, and the Schroedinger normal form.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>

#include "chlab/linops.hpp"
#include "chlab/matrixops.hpp"
#include "chlab/multisoliton.hpp"

using namespace chlab;

namespace {
bool below(const char* name, double val, double thr) {
  std::printf("  %-52s val=%.3e thr=%.3e\n", name, val, thr);
  return std::isfinite(val) && val <= thr;
}
struct Setup {
  Grid g{512, 80.0, -40.0};
  SolitonParams p{4.0, 1.0};
  SolitonProfile s;
  Setup() : s(build_profile(p, g)) {}
};
}  // namespace

TEST_CASE("recursion eigenrelations on the wave") {
  Setup st;
  RecursionOps ops = build_recursion(st.s);
  double em = (ops.R * st.s.m.v - st.p.c * st.s.m.v).norm() /
              (st.p.c * st.s.m.v.norm());
  CHECK(below("R m = c m", em, 1e-5));
  double et = (ops.Rstar * st.s.dphi.v - st.p.c * st.s.dphi.v).norm() /
              (st.p.c * st.s.dphi.v.norm());
  CHECK(below("R* phi' = c phi'", et, 1e-5));

  Field inv_root(st.g, (st.s.m.v.array() + st.p.omega).rsqrt());
  Field target(st.g, inv_root.v - derivative(inv_root, 2).v);
  Vec out = ops.R * target.v;
  CHECK(below("R(1-d^2)(m+w)^{-1/2} = 2 sqrt(w)",
              (out.array() - 2.0 * std::sqrt(st.p.omega)).abs().maxCoeff(), 1e-6));
}

TEST_CASE("hessian kernel and symmetry") {
  Setup st;
  Mat L1 = build_L1(st.s);
  double k = (L1 * st.s.dphi.v).norm() / (op_norm(L1) * st.s.dphi.v.norm());
  CHECK(below("L1 phi' = 0 (normalized)", k, 1e-7));
  CHECK(below("L1 symmetric (raw)", op_norm(L1 - L1.transpose()) / op_norm(L1), 1e-12));
}

TEST_CASE("intertwining residuals on the windowed class") {
  Setup st;
  for (int n : {1, 2}) {
    CAPTURE(n);
    CommutatorResiduals cr = commutator_residuals(st.s, n);
    CHECK(below("r1: L_n J R = R L_n J", cr.r1, 1e-6));
    CHECK(below("r2: J L_n R* = R* J L_n", cr.r2, 1e-6));
    CHECK(below("skew: R* J = J R", cr.skew, 1e-6));
    CHECK(below("sym: L_n = L_n^T", cr.sym, 1e-6));
    CHECK(below("similarity R = (1-d^2) K (1-d^2)^{-1}", cr.similarity, 1e-10));
  }
}

TEST_CASE("hierarchy step is the defining construction") {
  Setup st;
  RecursionOps ops = build_recursion(st.s);
  Mat L1 = build_L1(st.s);
  Mat L2 = build_Ln(st.s, 2), L3 = build_Ln(st.s, 3);
  CHECK(below("L2 = R L1", op_norm(L2 - ops.R * L1) / op_norm(L2), 1e-8));
  CHECK(below("L3 = R L2", op_norm(L3 - ops.R * L2) / op_norm(L3), 1e-8));
}

TEST_CASE("constant-background symbol") {
  std::vector<double> zg{0.5, 1.0, 2.0};
  auto sym = symbol_curve(4.0, 1.0, 1, zg);
  double dev = 0;
  for (size_t i = 0; i < zg.size(); ++i) {
    double z = zg[i];
    std::complex<double> expect =
        std::complex<double>(0, -1) * z * (4.0 * z * z + 2.0) / (1.0 + z * z);
    dev = std::max(dev, std::abs(sym[i] - expect));
  }
  CHECK(below("n=1 symbol closed form", dev, 1e-14));
  auto sym2 = symbol_curve(4.0, 1.0, 2, zg);
  double dev2 = 0;
  for (size_t i = 0; i < zg.size(); ++i) {
    double z = zg[i];
    std::complex<double> expect = std::complex<double>(0, -2) * z *
                                  (4.0 * z * z + 2.0) /
                                  std::pow(1.0 + z * z, 2);
    dev2 = std::max(dev2, std::abs(sym2[i] - expect));
  }
  CHECK(below("n=2 symbol closed form", dev2, 1e-14));
}

TEST_CASE("weighted operator domain") {
  Setup st;
  CHECK_THROWS(build_weighted_JL1(st.s, 0.0));
  CHECK_THROWS(build_weighted_JL1(st.s, -0.8));  // below a1 = -sqrt(1/2)
  CHECK_THROWS(build_weighted_JL1(st.s, 0.1));
}

TEST_CASE("weighted spectrum: kernel pair and gap") {
  Setup st;
  double a = -0.3;
  Mat La = build_weighted_JL1(st.s, a);
  EigenSpectrum es = eigen_spectrum(La);
  CHECK(below("eigenpair residual", es.max_pair_residual, 1e-8));

  std::vector<double> ks;
  for (double k = 0.0; k <= 40.0; k += 1e-3) ks.push_back(k);
  EssentialCurve curve = essential_curve_weighted(st.p.c, st.p.omega, a, ks);
  double Lambda = -1e300;
  for (auto& z : curve.z) Lambda = std::max(Lambda, z.real());
  CHECK(below("essential edge vs -0.540659", std::abs(Lambda + 0.540659), 1e-5));

  int small = 0;
  double worst_rest = -1e300;
  for (int i = 0; i < es.eigenvalues.size(); ++i) {
    if (std::abs(es.eigenvalues[i]) < 1e-4)
      ++small;
    else
      worst_rest = std::max(worst_rest, es.eigenvalues[i].real());
  }
  CHECK(small == 2);
  std::printf("  max Re (non-kernel) = %.6f, Lambda/2 = %.6f\n", worst_rest, Lambda / 2);
  CHECK(worst_rest < Lambda / 2);
}

TEST_CASE("dual kernel basis and projections") {
  Setup st;
  double a = -0.3;
  WeightedProjections wp = spectral_projections(st.s, a);
  CHECK(below("raw gram defect", wp.gram_defect, 1e-6));
  CHECK(wp.gram_cond < 1e6);

  Mat La = build_weighted_JL1(st.s, a);
  double scale = op_norm(La);
  CHECK(below("L_a f1 = 0",
              (La * wp.f1.v).norm() / (scale * wp.f1.v.norm()), 1e-5));
  CHECK(below("L_a f2 = f1 (Jordan step)",
              (La * wp.f2.v - wp.f1.v).norm() / wp.f1.v.norm(), 1e-4));

  // P + Q = I and P^2 = P on a generic vector
  Field z = seeded_noise(st.g, 0.0, 1.0, 11u);
  CHECK(below("P + Q = I", ((wp.P + wp.Q) * z.v - z.v).norm() / z.v.norm(), 1e-10));
  CHECK(below("P idempotent", (wp.P * (wp.P * z.v) - wp.P * z.v).norm() / z.v.norm(), 1e-8));
  CHECK(below("dEdc bookkeeping vs closed form",
              std::abs(wp.dEdc - 4.0 * st.s.kappa * st.p.c) / wp.dEdc, 1e-4));
}

TEST_CASE("semigroup decay precondition") {
  Setup st;
  Field raw = seeded_noise(st.g, 0.0, 1.0, 7u);
  CHECK_THROWS(semigroup_decay_rate(st.s, -0.3, raw, 1.0));  // P raw != 0
}

TEST_CASE("normal-form potential") {
  std::vector<double> zs;
  for (double z = -3.0; z <= 3.0 + 1e-12; z += 0.05) zs.push_back(z);
  std::vector<double> V = liouville_transform_potential(6.0, 1.0, zs);
  double dev = 0;
  for (size_t i = 0; i < zs.size(); ++i) {
    double S2 = 1.0 / std::cosh(zs[i]) / std::cosh(zs[i]);
    double den = (3.0 - 2.0 * S2) * (3.0 - 2.0 * S2);
    double rational = (-90.0 * S2 + 110.0 * S2 * S2 - 35.0 * S2 * S2 * S2) / den;
    dev = std::max(dev, std::abs(V[i] - rational));
  }
  CHECK(below("rational-sech simplification", dev, 1e-10));
  // even, decaying, negative well at the origin of depth 15
  CHECK(below("V(0) = -15", std::abs(V[zs.size() / 2] + 15.0), 1e-10));
}
