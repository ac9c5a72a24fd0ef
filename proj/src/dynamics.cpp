#include "chlab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace chlab {

Field ch_rhs(const Field& u, double omega, bool dealias) {
  // -u u_x - d/dx (1-d^2)^{-1} (u^2 + (1/2) u_x^2 + 2w u). The equivalent
  // flux form -d/dx (1-d^2)^{-1} [ (3/2)u^2 + (1/2)u_x^2 + 2w u - (u u_x)_x ]
  // follows because u u_x = (1/2)(u^2)_x and (1-d^2) absorbs the difference;
  // the tests exercise both.
  Field ux = derivative(u, 1);
  Field u2 = dealias ? dealiased_product(u, u)
                     : Field(u.grid, u.v.cwiseProduct(u.v));
  Field ux2 = dealias ? dealiased_product(ux, ux)
                      : Field(u.grid, ux.v.cwiseProduct(ux.v));
  Field uux = dealias ? dealiased_product(u, ux)
                      : Field(u.grid, u.v.cwiseProduct(ux.v));
  Field w(u.grid, u2.v + 0.5 * ux2.v + 2.0 * omega * u.v);
  Field tail = derivative(helmholtz_inverse(w), 1);
  return Field(u.grid, -uux.v - tail.v);
}

namespace {

void record(Trajectory& tr, double t, const Field& u, double omega) {
  tr.times.push_back(t);
  tr.states.push_back(u);
  Field ux = derivative(u, 1);
  tr.E.push_back(0.5 * (inner(u, u) + inner(ux, ux)));
  Field fint(u.grid, (u.v.array().cube() + u.v.array() * ux.v.array().square() +
                      2.0 * omega * u.v.array().square()).matrix());
  tr.F.push_back(0.5 * integrate(fint));
  Field m(u.grid, u.v - derivative(u, 2).v);
  if (omega > 0.0 && (m.v.array() + omega).minCoeff() > 0.0) {
    Field cas(u.grid, (((m.v.array() + omega) / omega).sqrt() - 1.0).matrix());
    tr.casimir.push_back(integrate(cas));
  } else {
    tr.casimir.push_back(std::nan(""));
  }
}

}  // namespace

Trajectory evolve(const Field& u0, double omega, double t_end,
                  const EvolveOptions& opt) {
  if (!(t_end >= 0.0) || !(opt.dt > 0.0))
    throw std::invalid_argument("evolve needs t_end >= 0 and dt > 0");
  const double sup0 = u0.v.cwiseAbs().maxCoeff();
  const long nsteps = std::lround(t_end / opt.dt);
  if (std::abs(nsteps * opt.dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("t_end must be an integer number of steps");

  Trajectory tr;
  Field u = u0;
  record(tr, 0.0, u, omega);

  auto rhs = [&](const Field& y) { return ch_rhs(y, omega, opt.dealias); };
  const double h = u0.grid.h();

  for (long s = 1; s <= nsteps; ++s) {
    double sup = u.v.cwiseAbs().maxCoeff();
    if (sup > opt.blowup_factor * std::max(sup0, 1e-300))
      throw std::runtime_error(
          "possible breaking / instability: amplitude grew past " +
          std::to_string(opt.blowup_factor) + "x its initial size");
    if (opt.dt * sup > opt.cfl_safety * h)
      throw std::runtime_error("CFL violation: dt * sup|u| exceeds " +
                               std::to_string(opt.cfl_safety) + " * h");

    Field k1 = rhs(u);
    Field y2(u.grid, u.v + 0.5 * opt.dt * k1.v);
    Field k2 = rhs(y2);
    Field y3(u.grid, u.v + 0.5 * opt.dt * k2.v);
    Field k3 = rhs(y3);
    Field y4(u.grid, u.v + opt.dt * k3.v);
    Field k4 = rhs(y4);
    u = Field(u.grid,
              u.v + (opt.dt / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v));

    if (s % opt.snapshot_stride == 0 || s == nsteps)
      record(tr, s * opt.dt, u, omega);
  }
  return tr;
}

PeakTrack peak_speed(const Trajectory& tr) {
  if (tr.states.size() < 2)
    throw std::invalid_argument("peak speed needs at least two snapshots");
  PeakTrack pt;
  pt.times = tr.times;
  const Grid& g = tr.states.front().grid;
  double prev = 0.0;
  for (size_t s = 0; s < tr.states.size(); ++s) {
    const Vec& u = tr.states[s].v;
    int i0;
    u.maxCoeff(&i0);
    // parabola through the crest node and its periodic neighbours
    double um = u[(i0 - 1 + g.n) % g.n], u0 = u[i0], up = u[(i0 + 1) % g.n];
    double denom = um - 2.0 * u0 + up;
    double frac = (denom < 0.0) ? 0.5 * (um - up) / denom : 0.0;
    double x = g.x(i0) + frac * g.h();
    if (s == 0) {
      prev = x;
    } else {
      // nearest periodic image: valid while the crest moves under half a
      // box between snapshots, which the CFL-limited stride guarantees
      prev += g.wrap(x - prev);
    }
    pt.positions.push_back(prev);
  }
  // least-squares line through (t, x)
  const size_t N = pt.times.size();
  double st = 0, sx = 0, stt = 0, stx = 0;
  for (size_t s = 0; s < N; ++s) {
    st += pt.times[s];
    sx += pt.positions[s];
    stt += pt.times[s] * pt.times[s];
    stx += pt.times[s] * pt.positions[s];
  }
  double denom = N * stt - st * st;
  pt.speed = (N * stx - st * sx) / denom;
  double x0 = (sx - pt.speed * st) / N;
  double ss_res = 0, ss_tot = 0, mean = sx / N;
  for (size_t s = 0; s < N; ++s) {
    double fit = x0 + pt.speed * pt.times[s];
    ss_res += (pt.positions[s] - fit) * (pt.positions[s] - fit);
    ss_tot += (pt.positions[s] - mean) * (pt.positions[s] - mean);
  }
  pt.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return pt;
}

}  // namespace chlab
