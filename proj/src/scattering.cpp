#include "chlab/scattering.hpp"

#include <cmath>
#include <stdexcept>

#include "chlab/matrixops.hpp"

namespace chlab {

using cd = std::complex<double>;

std::complex<double> lambda_of_k(cd k, double omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("spectral map needs w > 0");
  return -(k * k + 0.25) / omega;
}

namespace {

// Refinement so the RK4 phase advance per step stays <= 0.0055 rad (or the
// same bound on the growth exponent at imaginary k): the global error of the
// oscillatory integration is then ~ L |q|^{5/2} h^4 / 120 ~ 1e-8.
int auto_refine(const Field& m, double omega, cd k) {
  double qmax = 0.25 + (std::norm(k) + 0.25) / omega *
                           (m.v.cwiseAbs().maxCoeff() + omega);
  double h_rk_target = 0.0055 / std::sqrt(qmax);
  int R = 2;
  while (2.0 * m.grid.h() / R > h_rk_target && R < 1024) R *= 2;
  return R;
}

struct State {
  cd y, v;  // Psi, Psi_x
};

}  // namespace

JostSolution jost(const Field& m, double omega, cd k, int side,
                  int refine_factor) {
  if (side != 1 && side != -1)
    throw std::invalid_argument("side must be +1 or -1");
  const int R = refine_factor > 0 ? refine_factor : auto_refine(m, omega, k);
  const cd lam = lambda_of_k(k, omega);

  // potential q = 1/4 + lambda (m + w) on the fine mesh; at the (decayed)
  // edges q = -k^2 exactly, so e^{+-ikx} are exact solutions there.
  Vec m_fine = refine(m, R);
  const int Nf = m_fine.size();
  auto q = [&](int idx) -> cd {
    return 0.25 + lam * (m_fine[(idx % Nf + Nf) % Nf] + omega);
  };

  const Grid& g = m.grid;
  const double h_rk = 2.0 * g.h() / R;
  const int nsteps = Nf / 2;  // RK4 nodes 0..nsteps cover [x0, x0 + L]
  Grid fine(nsteps, g.length, g.x0);

  JostSolution out{CVec(nsteps + 1), CVec(nsteps + 1), 0.0, fine};

  // f^+ ~ e^{ikx} launched from the right edge, marching left; f^- ~ e^{-ikx}
  // from the left edge, marching right.
  const double x_start = (side == 1) ? g.x0 + g.length : g.x0;
  const double sgn_k = (side == 1) ? 1.0 : -1.0;
  State s{std::exp(cd(0, 1) * sgn_k * k * x_start),
          cd(0, 1) * sgn_k * k * std::exp(cd(0, 1) * sgn_k * k * x_start)};
  const double dir = (side == 1) ? -1.0 : 1.0;  // marching direction
  const double hs = dir * h_rk;

  int node = (side == 1) ? nsteps : 0;
  out.f[node] = s.y;
  out.fx[node] = s.v;

  for (int step = 0; step < nsteps; ++step) {
    // fine-mesh indices for this RK4 step: endpoints 2 apart, midpoint between
    int i0 = (side == 1) ? (nsteps - step) * 2 : step * 2;
    int im = i0 + (side == 1 ? -1 : 1);
    int i1 = i0 + (side == 1 ? -2 : 2);
    cd q0 = q(i0), qm = q(im), q1 = q(i1);

    auto f = [](const State& st, cd qq) { return State{st.v, qq * st.y}; };
    State k1 = f(s, q0);
    State k2 = f({s.y + 0.5 * hs * k1.y, s.v + 0.5 * hs * k1.v}, qm);
    State k3 = f({s.y + 0.5 * hs * k2.y, s.v + 0.5 * hs * k2.v}, qm);
    State k4 = f({s.y + hs * k3.y, s.v + hs * k3.v}, q1);
    s.y += (hs / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.v += (hs / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);

    double mag = std::max(std::abs(s.y), std::abs(s.v));
    if (mag > 1e100) {  // renormalize growing solutions at imaginary k
      s.y /= mag;
      s.v /= mag;
      double lg = std::log(mag);
      out.log_scale += lg;
      // previously stored nodes keep their own normalization; rescale them
      // so the whole array shares the final factor
      for (int j = 0; j <= nsteps; ++j) {
        out.f[j] /= mag;
        out.fx[j] /= mag;
      }
    }
    node += (side == 1) ? -1 : 1;
    out.f[node] = s.y;
    out.fx[node] = s.v;
  }
  return out;
}

namespace {

cd wronskian(const JostSolution& fm, const JostSolution& fp, int node) {
  return fm.f[node] * fp.fx[node] - fm.fx[node] * fp.f[node];
}

// a(k) = W(f^-, f^+)/(2ik) including the removed scale factors.
cd transmission(const JostSolution& fm, const JostSolution& fp, cd k, int node) {
  return wronskian(fm, fp, node) * std::exp(fm.log_scale + fp.log_scale) /
         (2.0 * cd(0, 1) * k);
}

}  // namespace

ScatteringCoeffs scattering_coeffs(const Field& m, double omega,
                                   const std::vector<double>& kgrid) {
  for (double k : kgrid)
    if (k == 0.0)
      throw std::invalid_argument(
          "k = 0 is not allowed: the Wronskian normalization degenerates");
  ScatteringCoeffs out;
  out.kgrid = kgrid;
  out.unitarity_defect = 0.0;
  out.station_defect = 0.0;
  for (double kv : kgrid) {
    cd k(kv, 0.0);
    JostSolution fp = jost(m, omega, k, +1);
    JostSolution fm = jost(m, omega, k, -1);
    int mid = fp.fine.n / 2, quarter = fp.fine.n / 4;
    cd a_mid = transmission(fm, fp, k, mid);
    cd a_q = transmission(fm, fp, k, quarter);
    out.station_defect =
        std::max(out.station_defect, std::abs(a_mid - a_q) / std::abs(a_mid));
    // b(k) = -W(f^-(., k), f^+(., -k))/(2ik); for real k and the real
    // potential, f^+(., -k) is the conjugate of f^+(., k).
    cd b_mid = -(fm.f[mid] * std::conj(fp.fx[mid]) -
                 fm.fx[mid] * std::conj(fp.f[mid])) *
               std::exp(fm.log_scale + fp.log_scale) / (2.0 * cd(0, 1) * k);
    out.a.push_back(a_mid);
    out.b.push_back(b_mid);
    out.unitarity_defect =
        std::max(out.unitarity_defect,
                 std::abs(std::norm(a_mid) - std::norm(b_mid) - 1.0));
  }
  return out;
}

namespace {

// Real Wronskian-based a(i kappa) (the Jost pair is real there); only the
// value matters for bisection, the scale handling keeps it finite.
double a_imag_axis(const Field& m, double omega, double kappa, int* mid_node,
                   double* b_ratio) {
  cd k(0.0, kappa);
  JostSolution fp = jost(m, omega, k, +1);
  JostSolution fm = jost(m, omega, k, -1);
  int mid = fp.fine.n / 2;
  if (mid_node) *mid_node = mid;
  if (b_ratio)
    *b_ratio = (fm.f[mid] / fp.f[mid]).real() *
               std::exp(fm.log_scale - fp.log_scale);
  cd a = transmission(fm, fp, k, mid);
  return a.real();
}

}  // namespace

DiscreteSpectrum discrete_eigenvalues(const Field& m, double omega,
                                      int max_count) {
  const double delta = 1e-4;
  const int scan = 64;
  std::vector<double> ks(scan), ws(scan);
  for (int i = 0; i < scan; ++i) {
    ks[i] = delta + (0.5 - 2 * delta) * i / double(scan - 1);
    ws[i] = a_imag_axis(m, omega, ks[i], nullptr, nullptr);
  }
  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i + 1 < scan; ++i)
    if (ws[i] == 0.0 || (ws[i] > 0) != (ws[i + 1] > 0))
      brackets.emplace_back(ks[i], ks[i + 1]);
  if ((int)brackets.size() > max_count)
    throw std::runtime_error("more discrete eigenvalues than max_count = " +
                             std::to_string(max_count));

  DiscreteSpectrum out;
  for (auto [lo, hi] : brackets) {
    double wlo = a_imag_axis(m, omega, lo, nullptr, nullptr);
    while (hi - lo > 1e-8) {
      double mid = 0.5 * (lo + hi);
      double wm = a_imag_axis(m, omega, mid, nullptr, nullptr);
      if ((wm > 0) == (wlo > 0)) {
        lo = mid;
        wlo = wm;
      } else {
        hi = mid;
      }
    }
    double kap = 0.5 * (lo + hi);
    const double dk = 1e-5;
    double ap = a_imag_axis(m, omega, kap + dk, nullptr, nullptr);
    double am = a_imag_axis(m, omega, kap - dk, nullptr, nullptr);
    // da/dk along the imaginary axis: dk_complex = i dkappa, a real there,
    // so adot = (a(k+)-a(k-))/(2 i dk) is purely imaginary.
    double adot_im = -(ap - am) / (2.0 * dk);
    double b = 0.0;
    a_imag_axis(m, omega, kap, nullptr, &b);
    out.kappa.push_back(kap);
    out.adot_im.push_back(adot_im);
    out.b.push_back(b);
    out.Cplus.push_back(b / (-adot_im));
    out.Cminus.push_back(1.0 / (b * (-adot_im)));
  }
  return out;
}

SquaredEigenfunction squared_eigenfunction(const Field& m, double omega, cd k,
                                           int side) {
  const int R = auto_refine(m, omega, k);
  JostSolution js = jost(m, omega, k, side, R);
  const cd lam = lambda_of_k(k, omega);
  const cd nu = -1.0 / (2.0 * lam);
  const Grid& g = m.grid;
  const int stride = R / 2;  // coarse node i sits at RK4 node i * R/2

  Field mp = derivative(m, 1);
  SquaredEigenfunction out{CVec(g.n), CVec(g.n), CVec(g.n), CVec(g.n), 0.0};
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < g.n; ++i) {
    cd f = js.f[i * stride], fx = js.fx[i * stride];
    cd qq = 0.25 + lam * (m.v[i] + omega);
    cd qp = lam * mp.v[i];
    cd F = f * f;
    cd Fx = 2.0 * f * fx;
    cd Fxx = 2.0 * (fx * fx + qq * F);
    cd Fxxx = 8.0 * qq * f * fx + 2.0 * qp * F;
    out.F[i] = F;
    out.Fx[i] = Fx;
    out.Fxx[i] = Fxx;
    out.Fxxx[i] = Fxxx;
    // local third-order form of K[m]F = nu F: differentiate after applying
    // (1 - d^2):  m' F + (2w + 2m) F' = nu (F' - F''')
    cd r = mp.v[i] * F + (2.0 * omega + 2.0 * m.v[i]) * Fx - nu * (Fx - Fxxx);
    double sc = std::abs(mp.v[i] * F) + std::abs((2.0 * omega + 2.0 * m.v[i]) * Fx) +
                std::abs(nu * (Fx - Fxxx));
    worst = std::max(worst, std::abs(r));
    scale = std::max(scale, sc);
  }
  out.residual_local = worst / scale;
  return out;
}

CompletenessResult completeness_residual(const SolitonProfile& s,
                                         const Field& z,
                                         const std::vector<double>& kgrid) {
  const Grid& g = z.grid;
  const double w = s.params.omega, c = s.params.c, kap = s.kappa;
  const double dEdc = 4.0 * kap * c;

  const double dc = 1e-4;
  SolitonProfile sp = build_profile({c + dc, w}, g, s.x_peak);
  SolitonProfile sm = build_profile({c - dc, w}, g, s.x_peak);
  Field dphi_dc(g, (sp.phi.v - sm.phi.v) / (2.0 * dc));
  Field dm_dc(g, (sp.m.v - sm.m.v) / (2.0 * dc));
  double mu = (integrate(sp.phi) - integrate(sm.phi)) / (2.0 * dc);

  // Discrete coefficients with the Gram correction: the secondary family
  // { m_phi, d^{-1} d_c m } is biorthogonal to { d_c phi, phi' } up to the
  // cross pairing <d_c phi, d^{-1} d_c m> = mu^2 / 2.
  Field h = line_cumulative(dm_dc);
  double gamma = inner(s.m, z) / dEdc;
  double beta = ((0.5 * mu * mu) * gamma - inner(h, z)) / dEdc;

  Field rec(g, gamma * dphi_dc.v + beta * s.dphi.v);

  // Continuum part: the expansion runs over the x-derivatives (F^+)_x with
  // density -<(1-d^2) conj F^+(., k), z> / (2 pi i k |a|^2), folded over +-k
  // ((F d/dx F)(-k) = conj of the same at k), trapezoid on the k-grid.
  ScatteringCoeffs sc = scattering_coeffs(s.m, w, kgrid);
  std::vector<CVec> Fk;
  std::vector<cd> P(kgrid.size());
  for (size_t j = 0; j < kgrid.size(); ++j) {
    SquaredEigenfunction se = squared_eigenfunction(s.m, w, cd(kgrid[j], 0), +1);
    CVec G = (se.F - se.Fxx).conjugate();
    cd pair = 0.0;
    for (int i = 0; i < g.n; ++i) pair += G[i] * z.v[i];
    pair *= g.h();
    P[j] = -pair / (2.0 * M_PI * cd(0, 1) * kgrid[j] * std::norm(sc.a[j]));
    Fk.push_back(se.Fx);
  }
  for (size_t j = 0; j + 1 < kgrid.size(); ++j) {
    double dk = kgrid[j + 1] - kgrid[j];
    for (int i = 0; i < g.n; ++i) {
      cd seg = 0.5 * dk * (P[j] * Fk[j][i] + P[j + 1] * Fk[j + 1][i]);
      rec.v[i] += 2.0 * seg.real();
    }
  }

  CompletenessResult out{rec, 0.0, gamma, beta};
  Field diff(g, rec.v - z.v);
  out.relative_l2_error = l2_norm(diff) / l2_norm(z);
  return out;
}

}  // namespace chlab
