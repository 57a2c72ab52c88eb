#include "affsym/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "affsym/errors.hpp"

namespace affsym {

Mat3 inverse(const Mat3& A) {
  const double d = A.det();
  Mat3 R;
  R(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  R(0, 1) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  R(0, 2) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  R(1, 0) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  R(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  R(1, 2) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  R(2, 0) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  R(2, 1) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  R(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return R * (1.0 / d);
}

CharPoly3 char_poly(const Mat3& A) {
  const double tr = A.trace();
  /* sum of principal 2x2 minors */
  const double m01 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const double m02 = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  const double m12 = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  return {-tr, m01 + m02 + m12, -A.det()};
}

namespace {

double polish_root(double a, double b, double c, double x) {
  /* a few guarded Newton steps.  near a repeated root both f and f' sit at
     noise level and their quotient is arbitrary, so a step is only kept when
     it demonstrably shrinks the residual */
  auto eval = [&](double t) { return ((t + a) * t + b) * t + c; };
  double f = eval(x);
  for (int it = 0; it < 4; ++it) {
    const double df = (3.0 * x + 2.0 * a) * x + b;
    if (df == 0.0) break;
    const double step = f / df;
    if (!std::isfinite(step) || std::fabs(step) > 1.0 + std::fabs(x)) break;
    const double xn = x - step;
    const double fn = eval(xn);
    if (!(std::fabs(fn) < std::fabs(f))) break;
    x = xn;
    f = fn;
  }
  return x;
}

}  // namespace

CubicRoots solve_cubic(double a, double b, double c) {
  CubicRoots out;
  /* depressed form t^3 + p t + q with x = t - a/3 */
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;

  /* p and q both at rounding level means a (near-)triple root at the shift;
     report it three times, as the contract promises multiplicities */
  const double s2 = std::max(1.0, shift * shift);
  if (std::fabs(p) <= 1e-12 * s2 && std::fabs(q) <= 1e-12 * s2 * std::sqrt(s2)) {
    out.count = 3;
    out.r[0] = out.r[1] = out.r[2] = shift;
    return out;
  }

  /* branch on the cosine argument instead of the discriminant: the latter
     cancels catastrophically at double roots and then picks the one-root
     branch at random */
  double arg = 2.0;
  if (p < 0.0) {
    const double rho = 2.0 * std::sqrt(-p / 3.0);
    arg = 3.0 * q / (p * rho);
    if (std::fabs(arg) <= 1.0 + 1e-10) {
      const double theta = std::acos(std::clamp(arg, -1.0, 1.0)) / 3.0;
      out.count = 3;
      for (int k = 0; k < 3; ++k)
        out.r[k] = shift + rho * std::cos(theta - 2.0 * M_PI * k / 3.0);
    }
  }
  if (out.count == 0) {
    /* one real root (p >= 0 makes the cubic monotone): stable Cardano */
    const double u = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double w = std::cbrt(-q / 2.0 + (q >= 0.0 ? -u : u));
    double t = (w == 0.0) ? 0.0 : w - p / (3.0 * w);
    out.count = 1;
    out.r[0] = shift + t;
  }
  for (int k = 0; k < out.count; ++k) out.r[k] = polish_root(a, b, c, out.r[k]);
  std::sort(out.r, out.r + out.count);
  return out;
}

Vec3 null_direction(const Mat3& A) {
  const Vec3 r0 = A.row(0), r1 = A.row(1), r2 = A.row(2);
  const Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  const double n01 = dot(c01, c01), n02 = dot(c02, c02), n12 = dot(c12, c12);
  Vec3 best = c01;
  double nb = n01;
  if (n02 > nb) { best = c02; nb = n02; }
  if (n12 > nb) { best = c12; nb = n12; }
  if (nb == 0.0) return {1.0, 0.0, 0.0};  // zero matrix: any direction
  return best / std::sqrt(nb);
}

SymEigen3 sym_eigen(const Mat3& A) {
  SymEigen3 out;
  /* scale to unit max entry first so the cubic is well conditioned */
  const double scale = max_abs(A);
  if (scale == 0.0) {
    out.vec[0] = {1, 0, 0};
    out.vec[1] = {0, 1, 0};
    out.vec[2] = {0, 0, 1};
    return out;
  }
  const Mat3 B = A * (1.0 / scale);
  /* symmetric-specific trigonometric eigenvalues: three real roots by
     construction, so repeated values cannot push the solver onto the
     complex-pair branch of the general cubic */
  const double m = B.trace() / 3.0;
  Mat3 D = B;
  D(0, 0) -= m;
  D(1, 1) -= m;
  D(2, 2) -= m;
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p2 += D(i, j) * D(i, j);
  const double p = std::sqrt(p2 / 6.0);
  double lam[3];
  if (p == 0.0) {
    lam[0] = lam[1] = lam[2] = m;
  } else {
    const double r = (D * (1.0 / p)).det() / 2.0;
    const double phi = std::acos(std::clamp(r, -1.0, 1.0)) / 3.0;
    lam[0] = m + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    lam[2] = m + 2.0 * p * std::cos(phi);
    lam[1] = 3.0 * m - lam[0] - lam[2];
  }
  const CharPoly3 cp = char_poly(B);
  for (double& l : lam) l = polish_root(cp.c2, cp.c1, cp.c0, l);
  std::sort(lam, lam + 3);

  for (int k = 0; k < 3; ++k) {
    Mat3 S = B;
    S(0, 0) -= lam[k]; S(1, 1) -= lam[k]; S(2, 2) -= lam[k];
    out.vec[k] = null_direction(S);
    out.lambda[k] = lam[k] * scale;
  }
  /* repeated eigenvalues: make the eigenvectors mutually orthogonal */
  for (int k = 1; k < 3; ++k) {
    Vec3 v = out.vec[k];
    for (int j = 0; j < k; ++j) v -= out.vec[j] * dot(v, out.vec[j]);
    const double n = norm(v);
    if (n > 1e-6) {
      out.vec[k] = v / n;
    } else {
      /* degenerate direction: complete orthogonally */
      Vec3 seed = (std::fabs(out.vec[0][0]) < 0.9) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      Vec3 w = cross(out.vec[0], seed);
      w = w / norm(w);
      out.vec[k] = (k == 1) ? w : cross(out.vec[0], out.vec[1]);
    }
  }
  return out;
}

double Mat4::det() const {
  double a[4][4];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a[r][c] = m[r][c];
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < 4; ++c) std::swap(a[piv][c], a[col][c]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

Vec4 Mat4::solve(const Vec4& rhs) const {
  double a[4][5];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a[r][c] = m[r][c];
    a[r][4] = rhs[r];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-300)
      throw DegenerateInput("singular 4x4 system");
    if (piv != col)
      for (int c = col; c < 5; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Vec4 x;
  for (int r = 3; r >= 0; --r) {
    double s = a[r][4];
    for (int c = r + 1; c < 4; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

ThinSvd thin_svd(const std::vector<double>& a, int rows, int cols) {
  /* columns of the working copy are rotated in place until pairwise
     orthogonal; the accumulated rotations give the right singular vectors */
  std::vector<std::vector<double>> col(cols, std::vector<double>(rows));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) col[c][r] = a[static_cast<size_t>(r) * cols + c];

  std::vector<std::vector<double>> v(cols, std::vector<double>(cols, 0.0));
  for (int c = 0; c < cols; ++c) v[c][c] = 1.0;

  const int max_sweeps = 60;
  const double tol = 1e-15;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < cols - 1; ++p) {
      for (int q = p + 1; q < cols; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int r = 0; r < rows; ++r) {
          app += col[p][r] * col[p][r];
          aqq += col[q][r] * col[q][r];
          apq += col[p][r] * col[q][r];
        }
        if (std::fabs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
        off = std::max(off, std::fabs(apq) / std::sqrt(app * aqq + 1e-300));
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int r = 0; r < rows; ++r) {
          const double xp = col[p][r], xq = col[q][r];
          col[p][r] = cs * xp - sn * xq;
          col[q][r] = sn * xp + cs * xq;
        }
        for (int r = 0; r < cols; ++r) {
          const double vp = v[p][r], vq = v[q][r];
          v[p][r] = cs * vp - sn * vq;
          v[q][r] = sn * vp + cs * vq;
        }
      }
    }
    if (off < tol) break;
  }

  ThinSvd out;
  out.sigma.resize(cols);
  out.v.resize(cols);
  std::vector<int> order(cols);
  for (int c = 0; c < cols; ++c) {
    double s = 0.0;
    for (int r = 0; r < rows; ++r) s += col[c][r] * col[c][r];
    out.sigma[c] = std::sqrt(s);
    order[c] = c;
  }
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return out.sigma[i] > out.sigma[j]; });
  ThinSvd sorted;
  sorted.sigma.resize(cols);
  sorted.v.resize(cols);
  for (int c = 0; c < cols; ++c) {
    sorted.sigma[c] = out.sigma[order[c]];
    sorted.v[c] = v[order[c]];
  }
  return sorted;
}

}  // namespace affsym
