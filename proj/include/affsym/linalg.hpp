#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

/* small dense linear algebra sized for this project: everything lives in
   dimension 3 or 4, plus a one-sided Jacobi SVD for short-and-wide column
   problems (kernels of tall stencil matrices).  fixed-size structs, no heap. */

namespace affsym {

struct Vec3 {
  double x[3]{0.0, 0.0, 0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double a, double b, double c) : x{a, b, c} {}

  constexpr double& operator[](int i) { return x[i]; }
  constexpr double operator[](int i) const { return x[i]; }

  constexpr Vec3 operator+(const Vec3& o) const { return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2]}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2]}; }
  constexpr Vec3 operator-() const { return {-x[0], -x[1], -x[2]}; }
  constexpr Vec3 operator*(double s) const { return {x[0] * s, x[1] * s, x[2] * s}; }
  constexpr Vec3 operator/(double s) const { return {x[0] / s, x[1] / s, x[2] / s}; }
  Vec3& operator+=(const Vec3& o) { x[0] += o.x[0]; x[1] += o.x[1]; x[2] += o.x[2]; return *this; }
  Vec3& operator-=(const Vec3& o) { x[0] -= o.x[0]; x[1] -= o.x[1]; x[2] -= o.x[2]; return *this; }
  Vec3& operator*=(double s) { x[0] *= s; x[1] *= s; x[2] *= s; return *this; }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2];
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.x[1] * b.x[2] - a.x[2] * b.x[1],
          a.x[2] * b.x[0] - a.x[0] * b.x[2],
          a.x[0] * b.x[1] - a.x[1] * b.x[0]};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double max_abs(const Vec3& v) {
  return std::max({std::fabs(v.x[0]), std::fabs(v.x[1]), std::fabs(v.x[2])});
}

struct Vec4 {
  double x[4]{0.0, 0.0, 0.0, 0.0};

  constexpr Vec4() = default;
  constexpr Vec4(double a, double b, double c, double d) : x{a, b, c, d} {}

  constexpr double& operator[](int i) { return x[i]; }
  constexpr double operator[](int i) const { return x[i]; }

  constexpr Vec4 operator+(const Vec4& o) const {
    return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2], x[3] + o.x[3]};
  }
  constexpr Vec4 operator-(const Vec4& o) const {
    return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2], x[3] - o.x[3]};
  }
  constexpr Vec4 operator-() const { return {-x[0], -x[1], -x[2], -x[3]}; }
  constexpr Vec4 operator*(double s) const { return {x[0] * s, x[1] * s, x[2] * s, x[3] * s}; }
  constexpr Vec4 operator/(double s) const { return {x[0] / s, x[1] / s, x[2] / s, x[3] / s}; }
  Vec4& operator+=(const Vec4& o) { for (int i = 0; i < 4; ++i) x[i] += o.x[i]; return *this; }
  Vec4& operator-=(const Vec4& o) { for (int i = 0; i < 4; ++i) x[i] -= o.x[i]; return *this; }
};

constexpr Vec4 operator*(double s, const Vec4& v) { return v * s; }

constexpr double dot(const Vec4& a, const Vec4& b) {
  return a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2] + a.x[3] * b.x[3];
}

inline double norm(const Vec4& v) { return std::sqrt(dot(v, v)); }

inline double max_abs(const Vec4& v) {
  return std::max({std::fabs(v.x[0]), std::fabs(v.x[1]), std::fabs(v.x[2]), std::fabs(v.x[3])});
}

/* row-major 3x3 */
struct Mat3 {
  double m[3][3]{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

  constexpr double& operator()(int r, int c) { return m[r][c]; }
  constexpr double operator()(int r, int c) const { return m[r][c]; }

  static constexpr Mat3 identity() {
    Mat3 I;
    I.m[0][0] = I.m[1][1] = I.m[2][2] = 1.0;
    return I;
  }
  static constexpr Mat3 diagonal(double a, double b, double c) {
    Mat3 D;
    D.m[0][0] = a; D.m[1][1] = b; D.m[2][2] = c;
    return D;
  }
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 A;
    for (int r = 0; r < 3; ++r) { A.m[r][0] = c0[r]; A.m[r][1] = c1[r]; A.m[r][2] = c2[r]; }
    return A;
  }
  Vec3 column(int c) const { return {m[0][c], m[1][c], m[2][c]}; }
  Vec3 row(int r) const { return {m[r][0], m[r][1], m[r][2]}; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 R;
    for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) R.m[r][c] = m[r][c] + o.m[r][c];
    return R;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 R;
    for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) R.m[r][c] = m[r][c] - o.m[r][c];
    return R;
  }
  Mat3 operator*(double s) const {
    Mat3 R;
    for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) R.m[r][c] = m[r][c] * s;
    return R;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 R;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[r][k] * o.m[k][c];
        R.m[r][c] = s;
      }
    return R;
  }
  Mat3 transpose() const {
    Mat3 R;
    for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) R.m[r][c] = m[c][r];
    return R;
  }
  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
};

inline double max_abs(const Mat3& A) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::fabs(A.m[i][j]));
  return r;
}

inline double frobenius(const Mat3& A) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += A.m[i][j] * A.m[i][j];
  return std::sqrt(s);
}

/* adjugate-based inverse; caller checks det beforehand when singularity matters */
Mat3 inverse(const Mat3& A);

/* coefficients of the characteristic polynomial
   lambda^3 + c2 lambda^2 + c1 lambda + c0 */
struct CharPoly3 {
  double c2, c1, c0;
};
CharPoly3 char_poly(const Mat3& A);

/* real roots of lambda^3 + a lambda^2 + b lambda + c, closed form followed
   by a Newton polish; multiple roots are returned multiple times */
struct CubicRoots {
  int count = 0;          // 1 or 3
  double r[3]{0, 0, 0};   // sorted ascending
};
CubicRoots solve_cubic(double a, double b, double c);

/* best-effort unit kernel direction of a (near-)singular matrix, picked as
   the largest cross product of row pairs */
Vec3 null_direction(const Mat3& A);

/* eigen decomposition of a symmetric 3x3 by closed-form roots plus
   cross-product eigenvectors; eigenvalues ascending */
struct SymEigen3 {
  double lambda[3]{0, 0, 0};
  Vec3 vec[3];
};
SymEigen3 sym_eigen(const Mat3& A);

/* row-major 4x4, only what the jet pipeline needs */
struct Mat4 {
  double m[4][4]{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};

  constexpr double& operator()(int r, int c) { return m[r][c]; }
  constexpr double operator()(int r, int c) const { return m[r][c]; }

  static Mat4 from_columns(const Vec4& c0, const Vec4& c1, const Vec4& c2, const Vec4& c3) {
    Mat4 A;
    for (int r = 0; r < 4; ++r) {
      A.m[r][0] = c0[r]; A.m[r][1] = c1[r]; A.m[r][2] = c2[r]; A.m[r][3] = c3[r];
    }
    return A;
  }
  double det() const;
  /* partial-pivot LU solve; throws DegenerateInput when the pivot collapses */
  Vec4 solve(const Vec4& rhs) const;
};

inline double det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
  return Mat4::from_columns(a, b, c, d).det();
}

/* thin SVD of a rows x cols matrix (cols <= 16), one-sided Jacobi on the
   columns.  returns singular values (descending) and the right singular
   vectors as columns of v.  working on columns directly avoids forming
   A^T A and keeps small singular values honest. */
struct ThinSvd {
  std::vector<double> sigma;           // size cols
  std::vector<std::vector<double>> v;  // v[c] = right singular vector c, size cols
};
ThinSvd thin_svd(const std::vector<double>& a, int rows, int cols);  // a is row-major

}  // namespace affsym
