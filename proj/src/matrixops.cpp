#include "chlab/matrixops.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace chlab {

Mat diff_matrix(const Grid& g) {
  const int n = g.n;
  Mat D = Mat::Zero(n, n);
  const double scale = M_PI / g.length;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      if (j == l) continue;
      int d = j - l;
      double sgn = (d % 2 == 0) ? 1.0 : -1.0;
      D(j, l) = scale * sgn / std::tan(M_PI * d / double(n));
    }
  return D;
}

Mat helmholtz_matrix(const Grid& g) {
  Mat D = diff_matrix(g);
  Mat A = Mat::Identity(g.n, g.n) - D * D;
  return A.partialPivLu().inverse();
}

Mat band_projector(const Grid& g, int denom) {
  const int n = g.n, mc = n / denom;
  // Circulant with first row (1/n)(1 + 2 sum_{m<=mc} cos(2 pi m d / n)).
  Vec row(n);
  for (int d = 0; d < n; ++d) {
    double acc = 1.0;
    for (int m = 1; m <= mc; ++m) acc += 2.0 * std::cos(2.0 * M_PI * m * d / n);
    row[d] = acc / n;
  }
  Mat P(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) P(j, l) = row[(j - l + n) % n];
  return P;
}

Mat banded_multiplier(const Grid& g, const Field& f) {
  Mat P = band_projector(g);
  Vec coeff = P * f.v;  // band-limit the coefficient itself
  return P * coeff.asDiagonal() * P;
}

Mat antiderivative_matrix(const Grid& g) {
  const int n = g.n;
  const double h = g.h(), L = g.length, sigma = 1.2;

  // Circulant kernel of the pinned spectral primitive: B = (d/dx)^{-1} delta_0
  // on the mean-free sector (k = 0 and Nyquist channels set to zero, the
  // latter matching the differentiation matrix convention).
  Field delta(g, Vec::Unit(n, 0));
  CVec spec = rfft(delta);
  spec[0] = 0.0;
  for (int j = 1; j < n / 2; ++j) spec[j] /= std::complex<double>(0.0, g.k(j));
  spec[n / 2] = 0.0;
  Vec B = irfft(g, spec).v;

  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A(i, j) = B[(i - j + n) % n] - B[(n - j) % n];

  // Mollified saturation ramp: the sawtooth x - x0 convolved with a Gaussian,
  // so the forced return to zero happens smoothly across the seam.
  Vec lam(n);
  for (int i = 0; i < n; ++i) lam[i] = g.x(i) - g.x0;
  double lam_mean = lam.mean();
  CVec lspec = rfft(Field(g, Vec(lam.array() - lam_mean)));
  for (int j = 0; j <= n / 2; ++j)
    lspec[j] *= std::exp(-0.5 * sigma * sigma * g.k(j) * g.k(j));
  Vec ramp = irfft(g, lspec).v.array() + lam_mean;

  A += (h / L) * ramp * Vec::Ones(n).transpose();
  return A;
}

Mat mean_compression(const Grid& g) {
  const int n = g.n;
  return Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
}

Mat window_compression(const Grid& g) {
  const int n = g.n;
  const double xc = g.x0 + 0.5 * g.length;
  const double flat = 0.25 * g.length, sw = g.length / 28.0;
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    double d = std::abs(g.x(i) - xc) - flat;
    w[i] = d <= 0.0 ? 1.0 : std::exp(-0.5 * d * d / (sw * sw));
  }
  return w.asDiagonal();
}

double op_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m.transpose() * m);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double windowed_rel_residual(const Grid& g, const Mat& x, const Mat& y) {
  const int n = g.n;
  Mat W = window_compression(g);
  Mat P6 = band_projector(g, 6);
  Vec w = W.diagonal();
  // Output side additionally quotients the window-anchored constant: the
  // antiderivative bases its primitive at the seam node, so composites differ
  // from their line counterparts by (value of the true primitive at the seam)
  // times the constant vector. Subtracting the window-weighted mean removes
  // exactly that channel without coupling to junk outside the window the way
  // a plain box mean would.
  Mat To = P6 * W * (Mat::Identity(n, n) - Vec::Ones(n) * (w.transpose() / w.sum()));
  Mat Ti = W * P6;
  return op_norm(To * (x - y) * Ti) / op_norm(To * x * Ti);
}

Field line_cumulative(const Field& f) {
  const int n = f.n();
  const double h = f.grid.h();
  Vec out(n);
  out[0] = 0.0;
  for (int i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f.v[i - 1] + f.v[i]);
  Field f1 = derivative(f, 1), f3 = derivative(f, 3);
  out -= (h * h / 12.0) * (f1.v - Vec::Constant(n, f1.v[0]));
  out += (h * h * h * h / 720.0) * (f3.v - Vec::Constant(n, f3.v[0]));
  return Field(f.grid, std::move(out));
}

}  // namespace chlab
