#include "chlab/linops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace chlab {

namespace {

// Shared assembly of L1 with d/dx realized by an arbitrary matrix (the
// weighted version passes D - aI; multiplications are never shifted).
Mat assemble_L1(const SolitonProfile& s, const Mat& D) {
  const Grid& g = s.phi.grid;
  const double c = s.params.c, w = s.params.omega;
  Field phi2 = derivative(s.phi, 2);
  Field rest(g, 3.0 * s.phi.v - phi2.v);
  Mat Mphi = banded_multiplier(g, s.phi);
  Mat Mrest = banded_multiplier(g, rest);
  return -c * (D * D) + (c - 2.0 * w) * Mat::Identity(g.n, g.n) +
         D * Mphi * D - Mrest;
}

void check_weight(const SolitonProfile& s, double a) {
  double a1 = -std::sqrt(1.0 - 2.0 * s.params.omega / s.params.c);
  if (!(a > a1 && a < 0.0))
    throw std::invalid_argument(
        "weight exponent must lie in (" + std::to_string(a1) +
        ", 0): the conjugated kernel functions leave L^2 outside it");
}

}  // namespace

Mat build_L1(const SolitonProfile& s) {
  return assemble_L1(s, diff_matrix(s.phi.grid));
}

RecursionOps build_recursion(const SolitonProfile& s) {
  const Grid& g = s.phi.grid;
  const double w = s.params.omega;
  Mat D = diff_matrix(g);
  Mat H = helmholtz_matrix(g);
  Mat A = antiderivative_matrix(g);
  Mat Mm = banded_multiplier(g, s.m);
  Mat inner = 2.0 * w * Mat::Identity(g.n, g.n) + Mm + A * Mm * D;
  RecursionOps ops;
  ops.K = H * inner;
  ops.R = inner * H;
  ops.Rstar = ops.R.transpose();
  ops.J = -(D * H);
  return ops;
}

Mat build_Ln(const SolitonProfile& s, int n) {
  if (n < 1) throw std::invalid_argument("hierarchy index starts at 1");
  Mat L = build_L1(s);
  if (n == 1) return L;
  Mat R = build_recursion(s).R;
  for (int j = 1; j < n; ++j) L = R * L;
  return L;
}

CommutatorResiduals commutator_residuals(const SolitonProfile& s, int n) {
  const Grid& g = s.phi.grid;
  RecursionOps ops = build_recursion(s);
  Mat Ln = build_Ln(s, n);

  CommutatorResiduals out{};
  out.r1 = windowed_rel_residual(g, Ln * ops.J * ops.R, ops.R * Ln * ops.J);
  out.r2 = windowed_rel_residual(g, ops.J * Ln * ops.Rstar,
                                 ops.Rstar * ops.J * Ln);
  Mat D = diff_matrix(g);
  Mat oneMinusD2 = Mat::Identity(g.n, g.n) - D * D;
  Mat Rsim = oneMinusD2 * ops.K * helmholtz_matrix(g);
  out.similarity = op_norm(ops.R - Rsim) / op_norm(ops.R);
  out.skew = windowed_rel_residual(g, ops.J * ops.R, ops.Rstar * ops.J);
  out.sym = windowed_rel_residual(g, Ln, Ln.transpose());
  return out;
}

std::vector<std::complex<double>> symbol_curve(double c, double omega, int n,
                                               const std::vector<double>& zgrid) {
  std::vector<std::complex<double>> out;
  out.reserve(zgrid.size());
  for (double z : zgrid) {
    std::complex<double> iz(0.0, z);
    double pre = std::pow(2.0 * omega, n - 1);
    out.push_back(-pre * iz * (c * z * z + c - 2.0 * omega) /
                  std::pow(1.0 + z * z, n));
  }
  return out;
}

Mat build_weighted_JL1(const SolitonProfile& s, double a) {
  check_weight(s, a);
  const Grid& g = s.phi.grid;
  Mat Da = diff_matrix(g) - a * Mat::Identity(g.n, g.n);
  Mat Ha = (Mat::Identity(g.n, g.n) - Da * Da).partialPivLu().inverse();
  Mat Ja = -(Da * Ha);
  return Ja * assemble_L1(s, Da);
}

EssentialCurve essential_curve_weighted(double c, double omega, double a,
                                        const std::vector<double>& kgrid) {
  EssentialCurve out;
  for (double k : kgrid) {
    std::complex<double> mu(a, k);  // ik + a
    std::complex<double> denom = 1.0 - mu * mu;
    if (std::abs(denom) < 1e-12) {
      out.skipped_k.push_back(k);
      continue;
    }
    out.z.push_back(c * mu - 2.0 * omega * mu / denom);
  }
  return out;
}

WeightedProjections spectral_projections(const SolitonProfile& s, double a) {
  check_weight(s, a);
  const Grid& g = s.phi.grid;
  const double c = s.params.c, w = s.params.omega, dc = 1e-4;

  SolitonProfile spp = build_profile({c + dc, w}, g, s.x_peak);
  SolitonProfile spm = build_profile({c - dc, w}, g, s.x_peak);
  Field dphi_dc(g, (spp.phi.v - spm.phi.v) / (2.0 * dc));
  Field dm_dc(g, (spp.m.v - spm.m.v) / (2.0 * dc));
  double Ep = 0.5 * inner(spp.m, spp.phi), Em = 0.5 * inner(spm.m, spm.phi);
  double dEdc = (Ep - Em) / (2.0 * dc);
  double mu = (integrate(spp.phi) - integrate(spm.phi)) / (2.0 * dc);

  Vec expw(g.n), expwi(g.n);
  for (int i = 0; i < g.n; ++i) {
    expw[i] = std::exp(a * (g.x(i) - s.x_peak));
    expwi[i] = 1.0 / expw[i];
  }

  Field f1(g, expw.cwiseProduct(s.dphi.v));
  Field f2(g, expw.cwiseProduct(dphi_dc.v));

  // Right-convention antiderivative -int_x^inf keeps e^{-ax} g1 in L^2; the
  // convention flips the cross pairing's sign, hence the -mu^2/2 here.
  Field anti(g, line_cumulative(dm_dc).v -
                    Vec::Constant(g.n, integrate(dm_dc)));
  const double C1 = -1.0 / dEdc;
  const double C2 = -0.5 * mu * mu / (dEdc * dEdc);
  const double C3 = 1.0 / dEdc;
  Field g1(g, expwi.cwiseProduct(C1 * anti.v + C2 * s.m.v));
  Field g2(g, expwi.cwiseProduct(C3 * s.m.v));

  Eigen::Matrix2d G;
  G << inner(f1, g1), inner(f1, g2), inner(f2, g1), inner(f2, g2);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(G);
  double cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!(cond < 1e6))
    throw std::runtime_error("projection Gram matrix is ill-conditioned");
  double defect = (G - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();

  // Exact biorthonormalization: g~_k = sum_l g_l (G^{-1})_{lk}, so that
  // <f_j, g~_k> = delta_jk and P^2 = P to rounding.
  Eigen::Matrix2d Gi = G.inverse();
  Field g1n(g, Gi(0, 0) * g1.v + Gi(1, 0) * g2.v);
  Field g2n(g, Gi(0, 1) * g1.v + Gi(1, 1) * g2.v);

  WeightedProjections out{f1, f2, g1n, g2n, Mat(), Mat(), cond, defect, dEdc, mu};
  out.P = g.h() * (f1.v * g1n.v.transpose() + f2.v * g2n.v.transpose());
  out.Q = Mat::Identity(g.n, g.n) - out.P;
  return out;
}

EigenSpectrum eigen_spectrum(const Mat& op) {
  if (op.rows() > 2048)
    throw std::invalid_argument("dense spectra are capped at n = 2048");
  Eigen::EigenSolver<Mat> es(op);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue iteration failed to converge");

  const int n = op.rows();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return es.eigenvalues()[i].real() > es.eigenvalues()[j].real();
  });

  EigenSpectrum out{CVec(n), CMat(n, n), 0.0};
  for (int i = 0; i < n; ++i) {
    out.eigenvalues[i] = es.eigenvalues()[order[i]];
    out.eigenvectors.col(i) = es.eigenvectors().col(order[i]);
  }
  double anorm = op_norm(op);
  CMat resid = op * out.eigenvectors -
               out.eigenvectors * out.eigenvalues.asDiagonal();
  for (int i = 0; i < n; ++i)
    out.max_pair_residual =
        std::max(out.max_pair_residual, resid.col(i).norm() / anorm);
  return out;
}

std::vector<double> liouville_transform_potential(double c, double omega,
                                                  const std::vector<double>& zgrid) {
  if (!(c > 2.0 * omega)) throw std::invalid_argument("needs c > 2w");
  const double A = c - 2.0 * omega, sc = 0.5 * std::sqrt(A);
  std::vector<double> V;
  V.reserve(zgrid.size());
  for (double z : zgrid) {
    double T = std::tanh(sc * z), S2 = 1.0 - T * T;
    double psi = A * S2;
    double psip = -2.0 * A * sc * S2 * T;
    double psipp = -2.0 * A * sc * sc * S2 * (1.0 - 3.0 * T * T);
    V.push_back(-3.0 * psi + 3.0 * psipp / (4.0 * (c - psi)) +
                5.0 * psip * psip / (16.0 * (c - psi) * (c - psi)));
  }
  return V;
}

DecayFit semigroup_decay_rate(const SolitonProfile& s, double a,
                              const Field& w0, double t_end, double dt) {
  WeightedProjections proj = spectral_projections(s, a);
  Vec pw = proj.P * w0.v;
  if (pw.norm() > 1e-6 * w0.v.norm())
    throw std::invalid_argument(
        "initial data has a generalized-kernel component; project it out first");

  Mat La = build_weighted_JL1(s, a);
  const Grid& g = w0.grid;
  Vec w = w0.v;
  const long nsteps = std::lround(t_end / dt);

  DecayFit fit;
  auto sample = [&](double t) {
    fit.times.push_back(t);
    fit.log_norms.push_back(std::log(h1_norm(Field(g, w))));
  };
  sample(0.0);
  for (long st = 1; st <= nsteps; ++st) {
    Vec k1 = La * w;
    Vec k2 = La * (w + 0.5 * dt * k1);
    Vec k3 = La * (w + 0.5 * dt * k2);
    Vec k4 = La * (w + dt * k3);
    w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (st % 10 == 0 || st == nsteps) sample(st * dt);
  }

  // least squares on the second half
  double t_lo = 0.5 * t_end;
  double st_ = 0, sx = 0, stt = 0, stx = 0;
  int cnt = 0;
  for (size_t i = 0; i < fit.times.size(); ++i) {
    if (fit.times[i] < t_lo) continue;
    ++cnt;
    st_ += fit.times[i];
    sx += fit.log_norms[i];
    stt += fit.times[i] * fit.times[i];
    stx += fit.times[i] * fit.log_norms[i];
  }
  double denom = cnt * stt - st_ * st_;
  fit.rate = (cnt * stx - st_ * sx) / denom;
  double x0 = (sx - fit.rate * st_) / cnt;
  double ss_res = 0, ss_tot = 0, mean = sx / cnt;
  for (size_t i = 0; i < fit.times.size(); ++i) {
    if (fit.times[i] < t_lo) continue;
    double f = x0 + fit.rate * fit.times[i];
    ss_res += (fit.log_norms[i] - f) * (fit.log_norms[i] - f);
    ss_tot += (fit.log_norms[i] - mean) * (fit.log_norms[i] - mean);
  }
  fit.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace chlab
