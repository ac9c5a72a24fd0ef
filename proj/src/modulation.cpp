#include "chlab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chlab/spectral.hpp"

namespace chlab {

namespace {

// Quadrature nodes for the mollifier: Simpson weights times rho(y) on (-1,1),
// normalized to total mass 1/2. Built once; rho does not depend on K.
struct RhoTable {
  std::vector<double> y, w;
  RhoTable() {
    const int n = 2048;  // intervals
    const double h = 2.0 / n;
    y.resize(n + 1);
    w.resize(n + 1);
    double total = 0.0;
    for (int i = 0; i <= n; ++i) {
      y[i] = -1.0 + i * h;
      double rho = 0.0;
      if (std::abs(y[i]) < 1.0) rho = std::exp(-1.0 / (1.0 - y[i] * y[i]));
      double sw = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      w[i] = sw * (h / 3.0) * rho;
      total += w[i];
    }
    for (double& wi : w) wi *= 0.5 / total;
  }
};

const RhoTable& rho_table() {
  static RhoTable t;
  return t;
}

// Antiderivative of e^{-|s|} from -inf: exact per quadrature node, so G
// inherits G(eta) + G(-eta) = 1 from the symmetric node set.
double phi_exp(double s) { return s <= 0.0 ? std::exp(s) : 2.0 - std::exp(-s); }

}  // namespace

double PsiWeight::value(double x) const {
  double eta = x / K;
  if (eta <= -1.0) return C_g * std::exp(eta);
  if (eta >= 1.0) return 1.0 - C_g * std::exp(-eta);
  const RhoTable& t = rho_table();
  double s = 0.0;
  for (size_t i = 0; i < t.y.size(); ++i) s += t.w[i] * phi_exp(eta - t.y[i]);
  return s;
}

double PsiWeight::slope(double x) const {
  double eta = x / K;
  const RhoTable& t = rho_table();
  double s = 0.0;
  for (size_t i = 0; i < t.y.size(); ++i)
    s += t.w[i] * std::exp(-std::abs(eta - t.y[i]));
  return s / K;
}

PsiWeight psi_weight(double K) {
  if (!(K >= 1.0)) throw std::invalid_argument("weight scale needs K >= 1");
  const RhoTable& t = rho_table();
  double cg = 0.0;
  for (size_t i = 0; i < t.y.size(); ++i) cg += t.w[i] * std::exp(t.y[i]);
  return {K, cg};
}

namespace {

// Orthogonality defects <v, m_j> and <v, m_j'> for the current parameters.
// Profiles are rebuilt per call; Newton steps perturb one parameter at a time.
Vec ortho_residual(const Field& u, double omega, const std::vector<double>& c,
                   const std::vector<double>& x, Field* v_out) {
  const Grid& g = u.grid;
  const size_t N = c.size();
  Vec sum = Vec::Zero(g.n);
  std::vector<SolitonProfile> waves;
  waves.reserve(N);
  for (size_t j = 0; j < N; ++j) {
    waves.push_back(build_profile({c[j], omega}, g, x[j]));
    sum += waves[j].phi.v;
  }
  Field v(g, u.v - sum);
  Vec r(2 * N);
  for (size_t j = 0; j < N; ++j) {
    r[2 * j] = inner(v, waves[j].m);
    r[2 * j + 1] = inner(v, derivative(waves[j].m, 1));
  }
  if (v_out) *v_out = v;
  return r;
}

}  // namespace

ModulationState decompose(const Field& u, double omega, std::vector<double> c0,
                          std::vector<double> x0) {
  const size_t N = c0.size();
  if (N == 0 || x0.size() != N)
    throw std::invalid_argument("need one (speed, position) pair per wave");
  if (!std::is_sorted(x0.begin(), x0.end()))
    throw std::invalid_argument("initial positions must be ordered left to right");

  const double tol = 1e-10, fd = 1e-6;
  const int max_iter = 50;
  std::vector<double> c = c0, x = x0;

  auto eval = [&](const std::vector<double>& cc, const std::vector<double>& xx,
                  Field* v) -> Vec {
    try {
      return ortho_residual(u, omega, cc, xx, v);
    } catch (const std::exception&) {
      throw std::runtime_error(
          "modulation solve left the admissible speed range: state is "
          "outside the modulation tube");
    }
  };

  Field v = u;
  Vec r = eval(c, x, &v);
  int it = 0;
  while (r.cwiseAbs().maxCoeff() > tol) {
    if (++it > max_iter)
      throw std::runtime_error(
          "modulation solve did not converge in 50 iterations: state is "
          "outside the modulation tube");
    Mat J(2 * N, 2 * N);
    for (size_t j = 0; j < N; ++j) {
      std::vector<double> cp = c, xp = x;
      cp[j] += fd;
      J.col(2 * j) = (eval(cp, x, nullptr) - r) / fd;
      xp[j] += fd;
      J.col(2 * j + 1) = (eval(c, xp, nullptr) - r) / fd;
    }
    Vec step = J.partialPivLu().solve(r);
    for (size_t j = 0; j < N; ++j) {
      c[j] -= step[2 * j];
      x[j] -= step[2 * j + 1];
    }
    r = eval(c, x, &v);
  }
  return {c, x, v, it, r.cwiseAbs().maxCoeff()};
}

ModulationTrack track(const Trajectory& tr, double omega,
                      std::vector<double> c0, std::vector<double> x0) {
  ModulationTrack out;
  std::vector<double> c = std::move(c0), x = std::move(x0);
  for (size_t i = 0; i < tr.states.size(); ++i) {
    ModulationState st = decompose(tr.states[i], omega, c, x);
    c = st.c;
    x = st.x;
    out.times.push_back(tr.times[i]);
    out.c.push_back(st.c);
    out.x.push_back(st.x);
    out.vnorm_h1.push_back(h1_norm(st.v));
  }

  const size_t M = out.times.size(), N = c.size();
  out.cdot.assign(M, std::vector<double>(N));
  out.xdot_minus_c.assign(M, std::vector<double>(N));
  for (size_t i = 0; i < M; ++i) {
    size_t lo = (i == 0) ? 0 : i - 1;
    size_t hi = (i + 1 == M) ? i : i + 1;
    double dt = out.times[hi] - out.times[lo];
    for (size_t j = 0; j < N; ++j) {
      out.cdot[i][j] = (out.c[hi][j] - out.c[lo][j]) / dt;
      out.xdot_minus_c[i][j] =
          (out.x[hi][j] - out.x[lo][j]) / dt - out.c[i][j];
    }
  }
  return out;
}

namespace {

double interp_at(const std::vector<double>& t, const std::vector<double>& y,
                 double ti) {
  if (ti <= t.front()) return y.front();
  if (ti >= t.back()) return y.back();
  auto it = std::upper_bound(t.begin(), t.end(), ti);
  size_t i = it - t.begin();
  double s = (ti - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - s) * y[i - 1] + s * y[i];
}

}  // namespace

FunctionalSeries functionals(const Trajectory& tr,
                             const std::vector<double>& crest_times,
                             const std::vector<double>& crest_positions,
                             double omega, double c1, double t0,
                             const FunctionalOptions& opt) {
  double eff = (1.0 - opt.alpha) * (1.0 - opt.alpha) * c1;
  if (!(eff > 2.0 * omega))
    throw std::invalid_argument("weighted functionals need (1-alpha)^2 c1 > 2 w");
  double Kmin = std::sqrt(eff / (eff - 2.0 * omega));
  if (!(opt.K > Kmin))
    throw std::invalid_argument(
        "K must exceed sqrt((1-alpha)^2 c1 / ((1-alpha)^2 c1 - 2 w)) = " +
        std::to_string(Kmin));

  PsiWeight psi = psi_weight(opt.K);
  const Grid& g = tr.states.front().grid;
  double xt0 = interp_at(crest_times, crest_positions, t0);

  FunctionalSeries out{};
  double E0 = 0.0;
  for (size_t i = 0; i < tr.states.size(); ++i) {
    const Field& u = tr.states[i];
    Field ux = derivative(u, 1);
    double t = tr.times[i];
    double xt = interp_at(crest_times, crest_positions, t);
    double shift = opt.alpha * (xt0 - xt);

    double Esh = 0, Fsh = 0, ER = 0, EL = 0, FR = 0, Einv = 0;
    for (int j = 0; j < g.n; ++j) {
      double xi = g.wrap(g.x(j) - xt);  // crest-relative, in [-L/2, L/2)
      double e_den = u.v[j] * u.v[j] + ux.v[j] * ux.v[j];
      double f_den = u.v[j] * u.v[j] * u.v[j] + u.v[j] * ux.v[j] * ux.v[j] +
                     2.0 * omega * u.v[j] * u.v[j];
      Esh += e_den * psi.value(xi - opt.x0 - shift);
      Fsh += 0.5 * f_den * psi.value(xi + opt.x0 - shift);
      double pr = psi.value(xi - opt.x0);
      ER += 0.5 * e_den * pr;
      EL += 0.5 * e_den * (1.0 - pr);
      FR += 0.5 * f_den * pr;
      Einv += 0.5 * e_den;
    }
    double h = g.h();
    out.times.push_back(t);
    out.E_right_shifted.push_back(h * Esh);
    out.F_right_shifted.push_back(h * Fsh);
    out.E_R.push_back(h * ER);
    out.E_L.push_back(h * EL);
    out.F_R.push_back(h * FR);
    if (i == 0) E0 = h * Einv;
    out.E_total_drift =
        std::max(out.E_total_drift, std::abs(h * (ER + EL) - E0));
  }
  return out;
}

double localization_radius(const Field& u, double x_center, double eps) {
  const Grid& g = u.grid;
  Field ux = derivative(u, 1);
  std::vector<std::pair<double, double>> by_dist(g.n);  // (|xi|, density)
  for (int j = 0; j < g.n; ++j)
    by_dist[j] = {std::abs(g.wrap(g.x(j) - x_center)),
                  u.v[j] * u.v[j] + ux.v[j] * ux.v[j]};
  std::sort(by_dist.begin(), by_dist.end());

  double total = 0.0;
  for (auto& p : by_dist) total += p.second;
  double target = eps * eps * total;  // compare squared masses
  double tail = total;
  for (size_t j = 0; j < by_dist.size(); ++j) {
    if (tail <= target) return by_dist[j].first;
    tail -= by_dist[j].second;
  }
  return 0.5 * g.length;
}

double right_tail_decay(const Field& u, double x_center, double r_min,
                        double r_max, double width) {
  const Grid& g = u.grid;
  if (!(r_min < r_max) || !(width > 0) ||
      r_max + width > 0.5 * g.length)
    throw std::invalid_argument("tail windows must fit in half the box");
  const int nw = 33;
  double sr = 0, sl = 0, srr = 0, srl = 0;
  int cnt = 0;
  for (int i = 0; i < nw; ++i) {
    double r = r_min + (r_max - r_min) * i / (nw - 1);
    double mass = h1_norm_window(u, x_center + r, x_center + r + width);
    if (mass < 1e-150) continue;
    double lm = std::log(mass);
    ++cnt;
    sr += r;
    sl += lm;
    srr += r * r;
    srl += r * lm;
  }
  if (cnt < 3) throw std::runtime_error("tail windows are numerically empty");
  double slope = (cnt * srl - sr * sl) / (cnt * srr - sr * sr);
  return -slope;
}

TailSeries right_tail_series(const Trajectory& tr, const ModulationTrack& mt,
                             double omega) {
  if (tr.times.size() != mt.times.size())
    throw std::invalid_argument("trajectory and track must share snapshots");
  TailSeries out;
  const Grid& g = tr.states.front().grid;
  const double x_edge = g.x0 + g.length - g.h();
  for (size_t i = 0; i < tr.times.size(); ++i) {
    double t = tr.times[i];
    ModulationState st = decompose(tr.states[i], omega, mt.c[i], mt.x[i]);
    double ua = std::min(2.0 * omega * t, x_edge - 1.0);
    double va = std::min(mt.x[i].front() - 10.0, x_edge - 1.0);
    out.times.push_back(t);
    out.u_right.push_back(h1_norm_window(tr.states[i], ua, x_edge));
    out.v_right.push_back(h1_norm_window(st.v, va, x_edge));
  }
  return out;
}

}  // namespace chlab
