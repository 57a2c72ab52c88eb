#include "affsym/cubic.hpp"

#include <cmath>

#include "affsym/errors.hpp"

namespace affsym {

namespace {

constexpr int kTable[3][3][3] = {
    {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}},
    {{1, 3, 4}, {3, 6, 7}, {4, 7, 8}},
    {{2, 4, 5}, {4, 7, 8}, {5, 8, 9}},
};

constexpr int kMult[10] = {1, 3, 3, 3, 6, 3, 1, 3, 3, 1};

}  // namespace

int sym_index(int i, int j, int k) { return kTable[i][j][k]; }

int sym_multiplicity(int d) { return kMult[d]; }

CubicForm CubicForm::from_onb_coeffs(const std::array<double, 7>& a, const Frame& fr) {
  if (fr.kind != FrameKind::ONB)
    throw WrongFrameKind("orthonormal coefficients need an orthonormal frame");
  CubicForm c;
  c.frame = fr;
  c.dense = {a[0], a[1], a[2], a[3], a[4], a[0] - a[3], a[5], a[6], a[1] - a[5], a[2] - a[6]};
  return c;
}

CubicForm CubicForm::from_lvb_coeffs(const std::array<double, 7>& b, const Frame& fr) {
  if (fr.kind != FrameKind::LVB)
    throw WrongFrameKind("light-vector coefficients need a light-vector frame");
  CubicForm c;
  c.frame = fr;
  c.dense = {b[2], b[1], b[0], -2.0 * b[0], b[3], b[4], -2.0 * b[3], -2.0 * b[4], b[5], b[6]};
  return c;
}

std::array<double, 7> CubicForm::to_onb_coeffs(double tol) const {
  if (frame.kind != FrameKind::ONB)
    throw WrongFrameKind("coefficients are not in an orthonormal representation");
  const double scale = std::max(1.0, max_abs_value());
  if (apolarity_residual() > tol * scale)
    throw NotAdmissible("tensor violates the trace-free relations");
  return {dense[0], dense[1], dense[2], dense[3], dense[4], dense[6], dense[7]};
}

std::array<double, 7> CubicForm::to_lvb_coeffs(double tol) const {
  if (frame.kind != FrameKind::LVB)
    throw WrongFrameKind("coefficients are not in a light-vector representation");
  const double scale = std::max(1.0, max_abs_value());
  if (apolarity_residual() > tol * scale)
    throw NotAdmissible("tensor violates the trace-free relations");
  return {dense[2], dense[1], dense[0], dense[4], dense[5], dense[8], dense[9]};
}

double CubicForm::operator()(const Vec3& x, const Vec3& y, const Vec3& z) const {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += x[i] * y[j] * z[k] * dense[kTable[i][j][k]];
  return s;
}

Vec3 CubicForm::k_bilinear(const Vec3& x, const Vec3& y) const {
  Vec3 lowered;
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += x[i] * y[j] * dense[kTable[i][j][k]];
    lowered[k] = s;
  }
  if (frame.kind == FrameKind::ONB) return {-lowered[0], lowered[1], lowered[2]};
  return {lowered[2], lowered[1], lowered[0]};
}

CubicForm CubicForm::act(const Mat3& g) const {
  CubicForm out;
  out.frame = frame;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
              s += dense[kTable[a][b][c]] * g(a, i) * g(b, j) * g(c, k);
        out.dense[kTable[i][j][k]] = s;
      }
  return out;
}

CubicForm CubicForm::in_frame(const Frame& target) const {
  const Mat3 g = inverse(frame.basis_matrix()) * target.basis_matrix();
  CubicForm out = act(g);
  out.frame = target;
  return out;
}

double CubicForm::apolarity_residual() const {
  double worst = 0.0;
  for (int x = 0; x < 3; ++x) {
    double r;
    if (frame.kind == FrameKind::ONB)
      r = -dense[kTable[x][0][0]] + dense[kTable[x][1][1]] + dense[kTable[x][2][2]];
    else
      r = 2.0 * dense[kTable[x][0][2]] + dense[kTable[x][1][1]];
    worst = std::max(worst, std::fabs(r));
  }
  return worst;
}

double CubicForm::norm() const {
  double s = 0.0;
  for (int d = 0; d < 10; ++d) s += kMult[d] * dense[d] * dense[d];
  return std::sqrt(s);
}

double CubicForm::max_abs_value() const {
  double m = 0.0;
  for (double v : dense) m = std::max(m, std::fabs(v));
  return m;
}

double j_invariant(const CubicForm& c) {
  double s = 0.0;
  if (c.frame.kind == FrameKind::ONB) {
    const double sig[3] = {-1.0, 1.0, 1.0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double v = c.dense[kTable[i][j][k]];
          s += sig[i] * sig[j] * sig[k] * v * v;
        }
  } else {
    const int mir[3] = {2, 1, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          s += c.dense[kTable[i][j][k]] * c.dense[kTable[mir[i]][mir[j]][mir[k]]];
  }
  return s / 6.0;
}

double invariance_residual(const CubicForm& c, const Mat3& g) {
  const CubicForm moved = c.act(g);
  double worst = 0.0;
  for (int d = 0; d < 10; ++d)
    worst = std::max(worst, std::fabs(moved.dense[d] - c.dense[d]));
  return worst;
}

}  // namespace affsym
