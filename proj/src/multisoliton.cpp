#include "chlab/multisoliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "chlab/spectral.hpp"

namespace chlab {

Superposition superposition(const std::vector<SolitonParams>& waves,
                            const std::vector<double>& positions,
                            const Grid& g) {
  const size_t N = waves.size();
  if (N == 0 || positions.size() != N)
    throw std::invalid_argument("need one position per wave");

  std::vector<SolitonProfile> prof;
  prof.reserve(N);
  double slowest_scale = 0.0;
  for (size_t j = 0; j < N; ++j) {
    prof.push_back(build_profile(waves[j], g, positions[j]));
    slowest_scale = std::max(slowest_scale, 0.5 / prof[j].kappa);
  }

  // Gaps are measured cyclically; the wrap-around gap matters on a box.
  double min_gap = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j + 1 < N; ++j) {
    double gap = positions[j + 1] - positions[j];
    if (gap <= 0.0)
      throw std::invalid_argument("positions must be strictly ascending");
    min_gap = std::min(min_gap, gap);
  }
  if (N > 1)
    min_gap = std::min(min_gap, g.length - (positions.back() - positions.front()));
  if (N > 1 && min_gap < 10.0)
    throw std::invalid_argument(
        "waves closer than 10 overlap too strongly to superpose");

  Superposition out{Field(g, Vec::Zero(g.n)), 0.0, false};
  for (auto& p : prof) out.u.v += p.phi.v;

  if (N > 1) {
    for (int i = 0; i < g.n; ++i) {
      double top1 = 0.0, top2 = 0.0;  // two largest wave values at this node
      for (auto& p : prof) {
        double val = p.phi.v[i];
        if (val > top1) {
          top2 = top1;
          top1 = val;
        } else if (val > top2) {
          top2 = val;
        }
      }
      out.max_pairwise_overlap =
          std::max(out.max_pairwise_overlap, top1 * top2);
    }
    out.overlap_warning = min_gap < 2.0 * slowest_scale;
  }
  return out;
}

namespace {

// B(e^r) of the parametric N-wave at one abscissa. Stays in r = ln(y) so the
// powers y^{-2 kappa_n} never overflow on the meshes we use.
double eval_B(const std::vector<double>& kappa, const std::vector<double>& C,
              double r) {
  const int N = kappa.size();
  Eigen::MatrixXd M(N, N);
  Eigen::VectorXd pre(N);
  for (int n = 0; n < N; ++n) {
    double cn = C[n] * std::exp(-2.0 * kappa[n] * r);
    pre[n] = cn / (kappa[n] + 0.5);
    for (int p = 0; p < N; ++p)
      M(n, p) = (n == p ? 1.0 : 0.0) + cn / (kappa[n] + kappa[p]);
  }
  double B = 1.0 - pre.dot(M.partialPivLu().solve(Eigen::VectorXd::Ones(N)));
  if (!(B > 0.0))
    throw std::runtime_error("parametric wave evaluation lost positivity");
  return B;
}

// One quadrature pass at a given s-resolution. Splitting e^{-|x-g|} at the
// monotone image g(s) turns the double loop into two prefix sums.
Vec eval_pass(const std::vector<double>& kappa, const std::vector<double>& C,
              double omega, const Grid& g, int ns, double s_lo, double s_hi) {
  const double ds = (s_hi - s_lo) / (ns - 1);
  std::vector<double> gs(ns), weight(ns);
  double G = 0.0, prev_int = 0.0;
  for (int i = 0; i < ns; ++i) {
    double s = s_lo + i * ds;
    double B = eval_B(kappa, C, s);
    double integrand = std::exp(s) / (B * B);  // dG/ds
    if (i == 0)
      G = integrand;  // analytic tail: B nearly constant below s_lo
    else
      G += 0.5 * ds * (prev_int + integrand);
    prev_int = integrand;
    gs[i] = std::log(G);
    double trap = (i == 0 || i == ns - 1) ? 0.5 : 1.0;
    weight[i] = trap * ds * G / integrand;  // ds / g_s
  }

  // prefix sums of e^{+g} w and suffix sums of e^{-g} w
  std::vector<double> pref(ns + 1, 0.0), suff(ns + 1, 0.0);
  for (int i = 0; i < ns; ++i)
    pref[i + 1] = pref[i] + std::exp(gs[i]) * weight[i];
  for (int i = ns - 1; i >= 0; --i)
    suff[i] = suff[i + 1] + std::exp(-gs[i]) * weight[i];

  Vec u(g.n);
  int split = 0;  // first index with g(s) > x; x visits nodes in order
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j);
    while (split < ns && gs[split] <= x) ++split;
    double integral = std::exp(-x) * pref[split] + std::exp(x) * suff[split];
    // tails of the s-integral, where g(s) ~ s + const and 1/g_s ~ 1
    integral += std::exp(gs[0] - x) + std::exp(x - gs[ns - 1]);
    u[j] = 0.5 * omega * integral - omega;
  }
  return u;
}

}  // namespace

Field exact_n_soliton(const NSolitonSpec& spec, double t, const Grid& g) {
  const size_t N = spec.kappa.size();
  if (N < 1 || N > 2)
    throw std::invalid_argument("parametric evaluation covers N = 1 or 2 waves");
  if (spec.Cplus0.size() != N)
    throw std::invalid_argument("need one norming constant per wave");
  if (!(spec.omega > 0))
    throw std::invalid_argument("smooth travelling waves require w > 0");
  for (size_t n = 0; n < N; ++n) {
    if (!(spec.kappa[n] > 0.0 && spec.kappa[n] < 0.5))
      throw std::invalid_argument("discrete wavenumbers must lie in (0, 1/2)");
    if (!(spec.Cplus0[n] > 0.0))
      throw std::invalid_argument("norming constants must be positive");
  }
  for (size_t n = 0; n + 1 < N; ++n)
    if (std::abs(spec.kappa[n] - spec.kappa[n + 1]) < 1e-12)
      throw std::invalid_argument("discrete wavenumbers must be distinct");

  std::vector<double> C(N);
  for (size_t n = 0; n < N; ++n)
    C[n] = spec.Cplus0[n] *
           std::exp(4.0 * spec.omega * spec.kappa[n] * t /
                    (1.0 - 4.0 * spec.kappa[n] * spec.kappa[n]));

  // s-range: g(s) ~ s + const on both tails, so pad the box by enough that
  // e^{-|x-g|} is below rounding, plus the worst-case tail offset 2|ln B(0)|.
  double lnB0 = 0.0;
  for (size_t n = 0; n < N; ++n)
    lnB0 += std::log((1.0 - 2.0 * spec.kappa[n]) / (1.0 + 2.0 * spec.kappa[n]));
  double margin = 42.0 + 2.0 * std::abs(lnB0) +
                  std::abs(std::log(std::max(1e-30, *std::min_element(C.begin(), C.end()))));
  double s_lo = -0.5 * g.length - margin, s_hi = 0.5 * g.length + margin;
  if (s_hi > 600.0 || -s_lo > 600.0)
    throw std::invalid_argument("box too long for the parametric evaluator");

  int ns = 4096;
  Vec u = eval_pass(spec.kappa, C, spec.omega, g, ns, s_lo, s_hi);
  double change = std::numeric_limits<double>::infinity();
  for (int stage = 0; stage < 6 && change > 1e-6; ++stage) {
    ns *= 2;
    Vec u2 = eval_pass(spec.kappa, C, spec.omega, g, ns, s_lo, s_hi);
    change = (u2 - u).cwiseAbs().maxCoeff();
    u = u2;
  }
  if (change > 1e-4)
    throw std::runtime_error("parametric mesh refinement failed to settle");
  return Field(g, u);
}

// Band-limited noise under a width-20 envelope, scaled to H^1 size eps.
Field seeded_noise(const Grid& g, double center, double eps, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nrm(0.0, 1.0);
  const int modes = std::min(g.n / 8, 64);
  Vec raw = Vec::Zero(g.n);
  for (int j = 1; j <= modes; ++j) {
    double a = nrm(rng), b = nrm(rng);
    for (int i = 0; i < g.n; ++i) {
      double th = 2.0 * M_PI * j * (g.x(i) - g.x0) / g.length;
      raw[i] += a * std::cos(th) + b * std::sin(th);
    }
  }
  for (int i = 0; i < g.n; ++i) {
    double d = g.wrap(g.x(i) - center);
    raw[i] *= std::exp(-d * d / (2.0 * 20.0 * 20.0));
  }
  Field f(g, raw);
  double nn = h1_norm(f);
  if (nn == 0.0) return f;
  f.v *= eps / nn;
  return f;
}

TrainOutcome train_experiment(const TrainConfig& cfg, const Grid& g) {
  const size_t N = cfg.waves.size();
  if (N == 0 || cfg.positions.size() != N)
    throw std::invalid_argument("need one position per wave");
  for (size_t j = 0; j + 1 < N; ++j)
    if (!(cfg.waves[j].c < cfg.waves[j + 1].c))
      throw std::invalid_argument(
          "train speeds must ascend with position or the waves collide");

  Superposition sup = superposition(cfg.waves, cfg.positions, g);
  Field u0 = sup.u;
  if (cfg.epsilon > 0.0) {
    double center =
        0.5 * (cfg.positions.front() + cfg.positions.back());
    u0.v += seeded_noise(g, center, cfg.epsilon, cfg.seed).v;
  }

  EvolveOptions eopt;
  eopt.dt = cfg.dt;
  eopt.snapshot_stride = std::max(1L, std::lround(0.1 / cfg.dt));
  Trajectory tr = evolve(u0, cfg.waves[0].omega, cfg.t_end, eopt);

  TrainOutcome out{};
  out.stayed_in_tube = true;
  out.exit_time = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> c(N), x(cfg.positions);
  for (size_t j = 0; j < N; ++j) c[j] = cfg.waves[j].c;
  for (size_t i = 0; i < tr.states.size(); ++i) {
    try {
      ModulationState st = decompose(tr.states[i], cfg.waves[0].omega, c, x);
      c = st.c;
      x = st.x;
      out.tracked.times.push_back(tr.times[i]);
      out.tracked.c.push_back(st.c);
      out.tracked.x.push_back(st.x);
      out.tracked.vnorm_h1.push_back(h1_norm(st.v));
      out.max_residual_h1 = std::max(out.max_residual_h1, h1_norm(st.v));
    } catch (const std::exception&) {
      out.stayed_in_tube = false;
      out.exit_time = tr.times[i];
      break;
    }
  }
  if (out.tracked.times.empty())
    throw std::runtime_error("train left the modulation tube immediately");

  const size_t M = out.tracked.times.size();
  out.tracked.cdot.assign(M, std::vector<double>(N));
  out.tracked.xdot_minus_c.assign(M, std::vector<double>(N));
  for (size_t i = 0; i < M; ++i) {
    size_t lo = (i == 0) ? 0 : i - 1;
    size_t hi = (i + 1 == M) ? i : i + 1;
    double dt = out.tracked.times[hi] - out.tracked.times[lo];
    for (size_t j = 0; j < N; ++j) {
      out.tracked.cdot[i][j] =
          (out.tracked.c[hi][j] - out.tracked.c[lo][j]) / dt;
      out.tracked.xdot_minus_c[i][j] =
          (out.tracked.x[hi][j] - out.tracked.x[lo][j]) / dt -
          out.tracked.c[i][j];
    }
  }

  out.final_c = out.tracked.c.back();
  double x_rear = out.tracked.x.back().front();
  size_t last = out.tracked.times.size() - 1;
  out.tail_mass_behind =
      h1_norm_window(tr.states[last], x_rear - 50.0, x_rear - 10.0);
  return out;
}

}  // namespace chlab
