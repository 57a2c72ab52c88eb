#include <cmath>

#include "doctest.h"

#include "affsym/errors.hpp"
#include "affsym/linalg.hpp"

using namespace affsym;

TEST_CASE("inverse undoes a well conditioned matrix") {
  Mat3 a;
  a(0, 0) = 2.0; a(0, 1) = -1.0; a(0, 2) = 0.5;
  a(1, 0) = 0.0; a(1, 1) = 1.5;  a(1, 2) = -0.25;
  a(2, 0) = 1.0; a(2, 1) = 0.0;  a(2, 2) = 3.0;
  const Mat3 left = inverse(a) * a;
  const Mat3 right = a * inverse(a);
  CHECK(max_abs(left - Mat3::identity()) < 1e-13);
  CHECK(max_abs(right - Mat3::identity()) < 1e-13);
  CHECK(a.det() == doctest::Approx(inverse(a).det() * a.det() * a.det()).epsilon(1e-12));
}

TEST_CASE("char_poly matches trace, second invariant and determinant") {
  Mat3 a;
  a(0, 0) = 1.0; a(0, 1) = 2.0; a(0, 2) = 0.0;
  a(1, 0) = -1.0; a(1, 1) = 0.5; a(1, 2) = 3.0;
  a(2, 0) = 0.25; a(2, 1) = 0.0; a(2, 2) = -2.0;
  const CharPoly3 p = char_poly(a);
  CHECK(p.c2 == doctest::Approx(-a.trace()).epsilon(1e-14));
  CHECK(p.c0 == doctest::Approx(-a.det()).epsilon(1e-14));
  /* second invariant via principal 2x2 minors */
  const double i2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                    a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  CHECK(p.c1 == doctest::Approx(i2).epsilon(1e-14));
}

TEST_CASE("solve_cubic on three distinct roots") {
  /* (x-1)(x-2)(x-5) = x^3 - 8x^2 + 17x - 10 */
  const CubicRoots r = solve_cubic(-8.0, 17.0, -10.0);
  REQUIRE(r.count == 3);
  CHECK(r.r[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.r[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.r[2] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("solve_cubic keeps exact double roots in place") {
  /* (x+2)(x-1)^2: the repeated root must not wander off under polishing,
     because near a double root the Newton correction divides noise by noise */
  const CubicRoots r = solve_cubic(0.0, -3.0, 2.0);
  REQUIRE(r.count == 3);
  CHECK(std::fabs(r.r[0] + 2.0) < 1e-9);
  CHECK(std::fabs(r.r[1] - 1.0) < 1e-7);
  CHECK(std::fabs(r.r[2] - 1.0) < 1e-7);
}

TEST_CASE("solve_cubic on a triple root") {
  /* (x-2)^3 */
  const CubicRoots r = solve_cubic(-6.0, 12.0, -8.0);
  REQUIRE(r.count == 3);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(r.r[i] - 2.0) < 1e-5);
}

TEST_CASE("solve_cubic with a single real root") {
  /* x^3 + x + 1 has one real root near -0.6823278 */
  const CubicRoots r = solve_cubic(0.0, 1.0, 1.0);
  REQUIRE(r.count == 1);
  CHECK(r.r[0] == doctest::Approx(-0.68232780382801932).epsilon(1e-12));
}

TEST_CASE("sym_eigen on a diagonal matrix") {
  const Mat3 d = Mat3::diagonal(3.0, -1.0, 0.5);
  const SymEigen3 e = sym_eigen(d);
  CHECK(e.lambda[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(e.lambda[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(e.lambda[2] == doctest::Approx(3.0).epsilon(1e-13));
  for (int i = 0; i < 3; ++i) {
    const Vec3 r = d * e.vec[i] - e.lambda[i] * e.vec[i];
    CHECK(norm(r) < 1e-12);
    CHECK(norm(e.vec[i]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sym_eigen survives an exactly repeated eigenvalue") {
  /* I - 3 u u^T with unit u has eigenvalues (-2, 1, 1); classifying metrics
     relies on getting the signature of such matrices right to ~1e-9 */
  const Vec3 u{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
  Mat3 a = Mat3::identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) -= 3.0 * u[i] * u[j];
  const SymEigen3 e = sym_eigen(a);
  /* the isolated eigenvalue is sharp; the repeated pair can only be located
     to about sqrt(eps), the sensitivity of a double root */
  CHECK(std::fabs(e.lambda[0] + 2.0) < 1e-9);
  CHECK(std::fabs(e.lambda[1] - 1.0) < 5e-8);
  CHECK(std::fabs(e.lambda[2] - 1.0) < 5e-8);
  for (int i = 0; i < 3; ++i) {
    const Vec3 r = a * e.vec[i] - e.lambda[i] * e.vec[i];
    CHECK(norm(r) < 5e-8);
  }
  /* eigenvectors stay mutually orthogonal even inside the repeated block */
  CHECK(std::fabs(dot(e.vec[0], e.vec[1])) < 1e-7);
  CHECK(std::fabs(dot(e.vec[0], e.vec[2])) < 1e-7);
  CHECK(std::fabs(dot(e.vec[1], e.vec[2])) < 1e-7);
}

TEST_CASE("null_direction finds the kernel of a rank two matrix") {
  /* columns c0, c1, c0 + c1: kernel direction (1, 1, -1)/sqrt(3) */
  const Vec3 c0{1.0, 0.0, 2.0}, c1{0.0, 1.0, -1.0};
  const Mat3 a = Mat3::from_columns(c0, c1, c0 + c1);
  const Vec3 n = null_direction(a);
  CHECK(norm(a * n) < 1e-12);
  CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("det4 alternates and matches a known value") {
  const Vec4 a{1, 0, 0, 0}, b{0, 2, 0, 0}, c{0, 0, 3, 0}, d{0, 0, 0, 4};
  CHECK(det4(a, b, c, d) == doctest::Approx(24.0));
  CHECK(det4(b, a, c, d) == doctest::Approx(-24.0));
  CHECK(det4(a, a, c, d) == doctest::Approx(0.0));
}

TEST_CASE("Mat4 solve reproduces a crafted right hand side") {
  const Vec4 c0{1, 2, 0, 1}, c1{0, 1, 3, 0}, c2{2, 0, 1, 1}, c3{1, 1, 1, 5};
  const Mat4 a = Mat4::from_columns(c0, c1, c2, c3);
  const Vec4 x{0.5, -1.0, 2.0, 0.25};
  const Vec4 rhs = c0 * x[0] + c1 * x[1] + c2 * x[2] + c3 * x[3];
  const Vec4 got = a.solve(rhs);
  CHECK(max_abs(got - x) < 1e-12);
}

TEST_CASE("Mat4 solve rejects a singular system") {
  const Vec4 c0{1, 0, 0, 0}, c1{0, 1, 0, 0}, c2{1, 1, 0, 0}, c3{0, 0, 0, 1};
  const Mat4 a = Mat4::from_columns(c0, c1, c2, c3);
  CHECK_THROWS_AS((void)a.solve(Vec4{1, 1, 1, 1}), DegenerateInput);
}

TEST_CASE("thin_svd recovers singular values of a stacked diagonal") {
  /* 6x3 matrix with singular values 3, 2, 1 */
  std::vector<double> a(18, 0.0);
  a[0 * 3 + 0] = 3.0;
  a[1 * 3 + 1] = 2.0;
  a[2 * 3 + 2] = 1.0;
  const ThinSvd s = thin_svd(a, 6, 3);
  REQUIRE(s.sigma.size() == 3);
  CHECK(s.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.sigma[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thin_svd exposes a rank deficiency") {
  /* third column is the sum of the first two */
  std::vector<double> a;
  const double rows[4][2] = {{1, 0}, {0, 1}, {2, -1}, {1, 1}};
  for (auto& r : rows) {
    a.push_back(r[0]);
    a.push_back(r[1]);
    a.push_back(r[0] + r[1]);
  }
  const ThinSvd s = thin_svd(a, 4, 3);
  CHECK(s.sigma[2] < 1e-13 * s.sigma[0]);
  /* kernel vector proportional to (1, 1, -1) */
  const auto& v = s.v[2];
  const double scale = v[2];
  CHECK(std::fabs(v[0] + scale) < 1e-12);
  CHECK(std::fabs(v[1] + scale) < 1e-12);
}

TEST_CASE("singular values come out descending and rotation invariant") {
  /* multiplying rows into more rows must not change the spectrum */
  std::vector<double> a = {1, 2, 3, 0, 1, 1, 2, 0, 1};
  const ThinSvd s3 = thin_svd(a, 3, 3);
  std::vector<double> doubled = a;
  doubled.insert(doubled.end(), 9, 0.0);
  const ThinSvd s6 = thin_svd(doubled, 6, 3);
  CHECK(s3.sigma[0] >= s3.sigma[1]);
  CHECK(s3.sigma[1] >= s3.sigma[2]);
  for (int i = 0; i < 3; ++i) CHECK(s6.sigma[i] == doctest::Approx(s3.sigma[i]).epsilon(1e-10));
}
