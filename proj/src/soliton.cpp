#include "chlab/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace chlab {

namespace {

// log(cosh a / cosh b) without overflow: |a| - |b| + log1p pair.
double log_cosh_ratio(double a, double b) {
  return std::abs(a) - std::abs(b) + std::log1p(std::exp(-2.0 * std::abs(a))) -
         std::log1p(std::exp(-2.0 * std::abs(b)));
}

// Monotone cubic Hermite evaluation on one segment with the Fritsch-Carlson
// slope clamp; sa, sb are exact analytic slopes du/dx at the endpoints, and
// the clamp only ever acts where floating-point slopes overshoot near the
// crest.
double hermite(double xa, double xb, double ua, double ub, double sa,
               double sb, double x) {
  const double hseg = xb - xa;
  const double delta = (ub - ua) / hseg;
  if (delta == 0.0) {
    sa = sb = 0.0;
  } else {
    double alpha = sa / delta, beta = sb / delta;
    if (alpha < 0.0) sa = 0.0;
    if (beta < 0.0) sb = 0.0;
    double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      double tau = 3.0 / std::sqrt(r2);
      sa *= tau;
      sb *= tau;
    }
  }
  const double t = (x - xa) / hseg, t2 = t * t, t3 = t2 * t;
  return ua * (2 * t3 - 3 * t2 + 1) + ub * (-2 * t3 + 3 * t2) +
         hseg * (sa * (t3 - 2 * t2 + t) + sb * (t3 - t2));
}

// Tabulated parametric branch theta >= 0 (x, u, du/dx all ascending in x).
struct Branch {
  std::vector<double> x, u, s;
  double peak;       // u at theta = 0
  double x_max;      // x(theta_max)

  double eval(double d) const {  // d = |x - x_peak| >= 0
    if (d >= x_max) return 0.0;  // below 1e-14 * peak by construction
    auto it = std::upper_bound(x.begin(), x.end(), d);
    size_t j = std::min(size_t(it - x.begin()), x.size() - 1);
    size_t i = j - 1;
    return hermite(x[i], x[j], u[i], u[j], s[i], s[j], d);
  }
};

Branch tabulate(double c, double omega) {
  const double two_k = std::sqrt(1.0 - 2.0 * omega / c);
  const double kappa = 0.5 * two_k;
  const double theta0 = std::atanh(two_k);
  // u(theta)/(c-2w) = 1/(1 + (2w/c) sinh^2 theta) < 1e-14 past theta_max.
  const double theta_max = std::asinh(std::sqrt(1e14 * c / (2.0 * omega)));
  // Dense enough that the O(h^4) Hermite error stays below 1e-13 * peak:
  // spectral differentiation amplifies sampling noise by k_max^2, and the
  // second-derivative identities downstream budget ~1e-8 in sup norm.
  const int M = 32768;

  Branch br;
  br.x.resize(M);
  br.u.resize(M);
  br.s.resize(M);
  br.peak = c - 2.0 * omega;
  for (int i = 0; i < M; ++i) {
    double th = theta_max * i / double(M - 1);
    double denom = 1.0 + (2.0 * omega / c) * std::sinh(th) * std::sinh(th);
    double xv = th / kappa + log_cosh_ratio(th - theta0, th + theta0);
    double dxdth = 1.0 / kappa + std::tanh(th - theta0) - std::tanh(th + theta0);
    if (!(dxdth > 0.0))
      throw std::runtime_error("parametric representation lost monotonicity");
    double uv = br.peak / denom;
    double dudth = -br.peak * (2.0 * omega / c) * std::sinh(2.0 * th) / (denom * denom);
    br.x[i] = xv;
    br.u[i] = uv;
    br.s[i] = dudth / dxdth;
  }
  br.x_max = br.x.back();
  return br;
}

}  // namespace

SolitonProfile build_profile(const SolitonParams& p, const Grid& g, double x_peak) {
  if (!(p.omega > 0.0))
    throw std::invalid_argument("smooth travelling waves require w > 0");
  if (!(p.c > 2.0 * p.omega))
    throw std::invalid_argument("smooth travelling waves require c > 2w");

  Branch br = tabulate(p.c, p.omega);

  // The sampled tail at the farthest point of the periodic box must already
  // be negligible, or the wrapped copies would contaminate the profile.
  const double far = 0.5 * g.length;
  if (br.eval(far) > 1e-6 * br.peak)
    throw std::invalid_argument("grid too small: profile tail " +
                                std::to_string(br.eval(far)) +
                                " at half-box distance");

  // Periodize over the two nearest images so the sampled function is smooth
  // across the box seam (a single image would leave a derivative kink there
  // that spectral differentiation amplifies by k_max^2).
  Vec u(g.n);
  for (int i = 0; i < g.n; ++i) {
    double d = std::abs(g.wrap(g.x(i), x_peak));
    u[i] = br.eval(d) + br.eval(g.length - d);
  }

  SolitonProfile s{p, 0.5 * std::sqrt(1.0 - 2.0 * p.omega / p.c), x_peak,
                   Field(g, std::move(u)), Field(g), Field(g)};
  s.dphi = derivative(s.phi, 1);
  // The momentum density in closed form: exact positivity node by node, and
  // the cleanest Sturm-Liouville potential for the spectral problems. Its
  // consistency with the grid Helmholtz operator is measured separately.
  Vec m(g.n);
  for (int i = 0; i < g.n; ++i) {
    double ph = s.phi.v[i];
    m[i] = p.omega * ph * (2.0 * p.c - ph) / ((p.c - ph) * (p.c - ph));
  }
  s.m = Field(g, std::move(m));
  return s;
}

Field build_peakon(double c, const Grid& g, double x_peak) {
  Vec u(g.n);
  for (int i = 0; i < g.n; ++i) u[i] = c * std::exp(-std::abs(g.wrap(g.x(i), x_peak)));
  return Field(g, std::move(u));
}

double stationary_residual(const SolitonProfile& s) {
  const double c = s.params.c, w = s.params.omega;
  const Vec& phi = s.phi.v;
  Vec phi2 = derivative(s.phi, 2).v;
  Vec res = -c * phi + c * phi2 + 1.5 * phi.cwiseProduct(phi) + 2.0 * w * phi -
            phi.cwiseProduct(phi2) - 0.5 * s.dphi.v.cwiseProduct(s.dphi.v);
  return res.cwiseAbs().maxCoeff();
}

double first_integral_residual(const SolitonProfile& s) {
  const double c = s.params.c, w = s.params.omega;
  const Vec& phi = s.phi.v;
  Vec lhs = s.dphi.v.cwiseProduct(s.dphi.v).cwiseProduct(Vec::Constant(phi.size(), c) - phi);
  Vec rhs = phi.cwiseProduct(phi).cwiseProduct(Vec::Constant(phi.size(), c - 2.0 * w) - phi);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

MomentumCheck momentum_positivity(const SolitonProfile& s) {
  const double w = s.params.omega;
  if (!(w > 0.0)) throw std::invalid_argument("momentum positivity needs w > 0");
  double min_mw = (s.m.v.array() + w).minCoeff();
  // grid Helmholtz pair phi - phi'' against the closed-form density
  Vec m_spec = s.phi.v - derivative(s.phi, 2).v;
  double worst = (m_spec - s.m.v).cwiseAbs().maxCoeff();
  return {min_mw, worst};
}

InvariantValues closed_form_invariants(const SolitonParams& p) {
  const double w = p.omega, c = p.c;
  const double k = 0.5 * std::sqrt(1.0 - 2.0 * w / c);
  const double k2 = k * k, q = 1.0 - 4.0 * k2;  // q = 2w/c
  const double lg = std::log((1.0 - 2.0 * k) / (1.0 + 2.0 * k));
  InvariantValues iv{};
  iv.E = w * w * (lg + 4.0 * k * (1.0 + 4.0 * k2) / (q * q));
  iv.F = w * w * w * (lg + 4.0 * k * (3.0 + 32.0 * k2 - 48.0 * k2 * k2) / (3.0 * q * q * q));
  // From ∫ phi = 4 kappa c + 2w log((1+2k)/(1-2k)) and sqrt(m+w) = sqrt(w) c/(c-phi):
  iv.H0 = 4.0 * k * c - 2.0 * w * std::log((1.0 + 2.0 * k) / (1.0 - 2.0 * k));
  iv.casimir = 2.0 * std::log((1.0 + 2.0 * k) / (1.0 - 2.0 * k));
  iv.dEdc = 4.0 * k * c;
  iv.dFdc = 4.0 * k * c * c;
  return iv;
}

InvariantValues numeric_invariants(const SolitonProfile& s) {
  const double w = s.params.omega;
  if (((s.m.v.array() + w) <= 0.0).any())
    throw std::domain_error("momentum density leaves m + w > 0; functionals undefined");
  auto quad = [&](const SolitonProfile& pr) {
    const Vec& u = pr.phi.v;
    const Vec& ux = pr.dphi.v;
    double E = 0.5 * inner(pr.m, pr.phi);
    Field Fint(pr.phi.grid,
               (u.array().cube() + u.array() * ux.array().square() +
                2.0 * w * u.array().square()).matrix());
    return std::pair<double, double>(E, 0.5 * integrate(Fint));
  };
  auto [E, F] = quad(s);

  InvariantValues iv{};
  iv.E = E;
  iv.F = F;
  Field h0(s.phi.grid,
           ((s.m.v.array() + w).sqrt() - std::sqrt(w)).square().matrix());
  iv.H0 = integrate(h0);
  Field cas(s.phi.grid, (((s.m.v.array() + w) / w).sqrt() - 1.0).matrix());
  iv.casimir = integrate(cas);

  const double dc = 1e-4;
  SolitonProfile sp = build_profile({s.params.c + dc, w}, s.phi.grid, s.x_peak);
  SolitonProfile sm = build_profile({s.params.c - dc, w}, s.phi.grid, s.x_peak);
  auto [Ep, Fp] = quad(sp);
  auto [Em, Fm] = quad(sm);
  iv.dEdc = (Ep - Em) / (2.0 * dc);
  iv.dFdc = (Fp - Fm) / (2.0 * dc);
  return iv;
}

}  // namespace chlab
