#include <cmath>

#include "doctest.h"

#include "affsym/errors.hpp"
#include "affsym/minkowski.hpp"

using namespace affsym;

TEST_CASE("gram tables of the two reference kinds") {
  const Mat3 onb = gram_matrix(FrameKind::ONB);
  CHECK(onb(0, 0) == -1.0);
  CHECK(onb(1, 1) == 1.0);
  CHECK(onb(2, 2) == 1.0);
  CHECK(onb(0, 1) == 0.0);

  const Mat3 lvb = gram_matrix(FrameKind::LVB);
  CHECK(lvb(0, 2) == 1.0);
  CHECK(lvb(2, 0) == 1.0);
  CHECK(lvb(1, 1) == 1.0);
  CHECK(lvb(0, 0) == 0.0);
  CHECK(lvb(2, 2) == 0.0);
}

TEST_CASE("reference frames are valid and positively oriented") {
  const Frame onb = Frame::reference_onb();
  const Frame lvb = Frame::reference_lvb();
  CHECK(onb.is_valid());
  CHECK(lvb.is_valid());
  CHECK(onb.orientation() > 0.0);
  CHECK(lvb.orientation() > 0.0);
  CHECK(onb.gram_residual() < 1e-15);
  CHECK(lvb.gram_residual() < 1e-15);
}

TEST_CASE("reference light vectors pair as the lvb table demands") {
  const Frame lvb = Frame::reference_lvb();
  const Vec3 e = lvb.basis[0], v = lvb.basis[1], f = lvb.basis[2];
  CHECK(std::fabs(minkowski(e, e)) < 1e-15);
  CHECK(std::fabs(minkowski(f, f)) < 1e-15);
  CHECK(minkowski(e, f) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(minkowski(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(minkowski(e, v)) < 1e-15);
  CHECK(std::fabs(minkowski(f, v)) < 1e-15);
}

TEST_CASE("lvb_of_timelike_plane rebuilds the reference light frame") {
  const Vec3 t{1, 0, 0}, w{0, 0, 1};
  const Frame f = lvb_of_timelike_plane(t, w);
  CHECK(f.kind == FrameKind::LVB);
  CHECK(f.is_valid());
  CHECK(f.orientation() > 0.0);
  /* e and f must be the null directions (t +- w)/sqrt2 */
  CHECK(norm(f.basis[0] - (t + w) / std::sqrt(2.0)) < 1e-14);
  CHECK(norm(f.basis[2] - (w - t) / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("lvb_of_timelike_plane rejects swapped causal characters") {
  /* first argument must be the timelike one */
  CHECK_THROWS_AS((void)lvb_of_timelike_plane(Vec3{0, 1, 0}, Vec3{1, 0, 0}), DegenerateInput);
  /* non-orthogonal pair */
  CHECK_THROWS_AS((void)lvb_of_timelike_plane(Vec3{1, 0, 0}, Vec3{0.5, 0, 1}), DegenerateInput);
}

TEST_CASE("complete_onb produces a positively oriented orthonormal frame") {
  /* a boosted timelike direction */
  const double b = 1.3;
  Vec3 t{std::cosh(b), std::sinh(b) * 0.6, std::sinh(b) * 0.8};
  const Frame f = complete_onb(t);
  CHECK(f.kind == FrameKind::ONB);
  CHECK(f.is_valid(1e-12));
  CHECK(f.orientation() > 0.0);
  CHECK(minkowski(f.basis[0], f.basis[0]) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("onb_about_spacelike keeps the given middle leg") {
  const Vec3 v{0.0, 0.6, 0.8};
  const Frame f = onb_about_spacelike(v);
  CHECK(f.is_valid(1e-12));
  CHECK(norm(f.basis[1] - v) < 1e-13);
  CHECK(f.orientation() > 0.0);
}

TEST_CASE("lvb_adapted_to_nilpotent reads off the shear") {
  /* build a two-step nilpotent map in the reference lvb: n e = 0,
     n v = -s e, n f = s v, then check the adapter recovers s */
  const Frame lvb = Frame::reference_lvb();
  const double s = 0.75;
  const Mat3 basis = lvb.basis_matrix();
  Mat3 in_lvb;
  in_lvb(0, 1) = -s;
  in_lvb(1, 2) = s;
  const Mat3 n = basis * in_lvb * inverse(basis);
  const NilpotentAdapted ad = lvb_adapted_to_nilpotent(n);
  CHECK(ad.shear == doctest::Approx(s).epsilon(1e-10));
  CHECK(ad.frame.is_valid(1e-10));
  CHECK(ad.frame.orientation() > 0.0);
  CHECK(norm(n * ad.frame.basis[0]) < 1e-12);
  CHECK(norm(n * ad.frame.basis[1] + ad.shear * ad.frame.basis[0]) < 1e-12);
}

TEST_CASE("lvb_adapted_to_nilpotent rejects a non-nilpotent map") {
  CHECK_THROWS_AS((void)lvb_adapted_to_nilpotent(Mat3::identity()), DegenerateInput);
}

TEST_CASE("change_representation is inverse to itself and preserves traces") {
  Mat3 m;
  m(0, 0) = 0.3; m(0, 1) = -1.0; m(0, 2) = 2.0;
  m(1, 0) = 0.7; m(1, 1) = 0.1;  m(1, 2) = 0.0;
  m(2, 0) = -0.2; m(2, 1) = 1.5; m(2, 2) = -0.4;
  const Mat3 lvb = change_representation(m, FrameKind::ONB, FrameKind::LVB);
  const Mat3 back = change_representation(lvb, FrameKind::LVB, FrameKind::ONB);
  CHECK(max_abs(back - m) < 1e-13);
  CHECK(lvb.trace() == doctest::Approx(m.trace()).epsilon(1e-13));
  CHECK(lvb.det() == doctest::Approx(m.det()).epsilon(1e-12));
}

TEST_CASE("inner agrees with the basis change it abbreviates") {
  const Vec3 a{0.2, -1.0, 0.5}, b{1.0, 0.3, -0.7};
  /* coordinates w.r.t. the reference lvb of the vectors with those onb
     coordinates: inner(.., LVB) must equal the onb pairing of the rebuilt
     vectors */
  const Frame lvb = Frame::reference_lvb();
  const Vec3 va = lvb.basis[0] * a[0] + lvb.basis[1] * a[1] + lvb.basis[2] * a[2];
  const Vec3 vb = lvb.basis[0] * b[0] + lvb.basis[1] * b[1] + lvb.basis[2] * b[2];
  CHECK(inner(a, b, FrameKind::LVB) == doctest::Approx(minkowski(va, vb)).epsilon(1e-13));
}
