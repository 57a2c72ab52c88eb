#include <cmath>
#include <vector>

#include "doctest.h"

#include "affsym/blaschke.hpp"
#include "affsym/constructions.hpp"
#include "affsym/errors.hpp"
#include "affsym/stabilizer.hpp"

using namespace affsym;

namespace {

/* unit sphere graph patch: the definite model hypersphere with normal -phi,
   shape operator the identity and vanishing difference tensor */
ImmersionSampler unit_sphere() {
  ImmersionSampler s;
  s.evaluate = [](double t, double v, double w) {
    return Vec4{t, v, w, std::sqrt(1.0 - t * t - v * v - w * w)};
  };
  s.domain.lo = Vec3{-0.45, -0.45, -0.45};
  s.domain.hi = Vec3{0.45, 0.45, 0.45};
  s.name = "unit-sphere";
  return s;
}

/* graph with a genuine cubic term: not a hypersphere anywhere */
ImmersionSampler bumpy_graph() {
  ImmersionSampler s;
  s.evaluate = [](double t, double v, double w) {
    return Vec4{t, v, w, 0.5 * (t * t + v * v + w * w) + 0.3 * t * t * t + 0.2 * t * v * w};
  };
  s.domain.lo = Vec3{-0.6, -0.6, -0.6};
  s.domain.hi = Vec3{0.6, 0.6, 0.6};
  s.name = "bumpy-graph";
  return s;
}

struct SphereErrors {
  double xi, shape, k;
};

SphereErrors sphere_errors(double step) {
  const ImmersionSampler s = unit_sphere();
  const Vec3 pts[] = {{0.0, 0.0, 0.0}, {0.12, -0.07, 0.05}, {-0.1, 0.1, 0.08}};
  SphereErrors e{0.0, 0.0, 0.0};
  for (const Vec3& p : pts) {
    const BlaschkeData d = blaschke_data(s, p, step);
    const Vec4 phi = s(p);
    e.xi = std::max(e.xi, max_abs(d.xi + phi));
    e.shape = std::max(e.shape, max_abs(d.S - Mat3::identity()));
    for (const auto& kl : d.K) e.k = std::max(e.k, max_abs(kl));
  }
  return e;
}

}  // namespace

TEST_CASE("numeric_jet reproduces polynomial derivatives exactly") {
  ImmersionSampler s;
  s.evaluate = [](double t, double v, double w) {
    return Vec4{t * t * v, v * w, t + w * w * w, t * v * w};
  };
  s.domain.lo = Vec3{-1, -1, -1};
  s.domain.hi = Vec3{1, 1, 1};
  const Vec3 p{0.2, -0.3, 0.4};
  const Jet j = numeric_jet(s, p, 1e-2, 3);
  REQUIRE(j.has_third);

  /* first partials */
  CHECK(j.d1[0][0] == doctest::Approx(2.0 * p[0] * p[1]).epsilon(1e-10));
  CHECK(j.d1[1][0] == doctest::Approx(p[0] * p[0]).epsilon(1e-10));
  CHECK(j.d1[2][1] == doctest::Approx(p[1]).epsilon(1e-10));
  CHECK(j.d1[0][2] == doctest::Approx(1.0).epsilon(1e-10));
  /* second partials, pair order tt,tv,tw,vv,vw,ww */
  CHECK(j.d2[0][0] == doctest::Approx(2.0 * p[1]).epsilon(1e-9));
  CHECK(j.d2[1][0] == doctest::Approx(2.0 * p[0]).epsilon(1e-9));
  CHECK(j.d2[4][1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j.d2[5][2] == doctest::Approx(6.0 * p[2]).epsilon(1e-9));
  /* third partials in the dense triple order: ttv slot of component 0 is 2 */
  CHECK(j.d3[1][0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(j.d3[4][3] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::fabs(j.d3[0][0]) < 1e-8);
}

TEST_CASE("numeric_jet needs stencil room inside the box") {
  const ImmersionSampler s = unit_sphere();
  CHECK_THROWS_AS((void)numeric_jet(s, Vec3{0.449, 0.0, 0.0}, 1e-2), OutOfDomain);
}

TEST_CASE("sphere fixture: normal, shape operator and difference tensor") {
  const SphereErrors e = sphere_errors(1e-3);
  CHECK(e.xi < 1e-6);
  CHECK(e.shape < 1e-6);
  CHECK(e.k < 1e-6);
}

TEST_CASE("sphere fixture: halving the step gains at least eightfold") {
  /* measured where truncation still dominates roundoff */
  const SphereErrors coarse = sphere_errors(8e-3);
  const SphereErrors fine = sphere_errors(4e-3);
  CHECK(coarse.shape / fine.shape >= 8.0);
  CHECK(coarse.xi / fine.xi >= 8.0);
}

TEST_CASE("blaschke data on the sphere is internally consistent") {
  const ImmersionSampler s = unit_sphere();
  const BlaschkeData d = blaschke_data(s, Vec3{0.1, 0.05, -0.08}, 1e-3);
  CHECK(d.negative_directions == 0);
  CHECK(d.H_est == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(d.theta_residual < 1e-6);
  CHECK(d.apolarity_residual < 1e-6);
  CHECK(d.c_cross_residual < 1e-6);
  CHECK(d.weingarten_residual < 1e-6);
  CHECK(std::fabs(d.J) < 1e-9);
}

TEST_CASE("product quadric is a proper hypersphere with lorentzian metric") {
  const ImmersionSampler s = quadric_z2z2();
  const std::vector<Vec3> pts = grid_points(s.domain, 3, 3, 3);
  const HypersphereCheck hc = hypersphere_residual(s, pts);
  CHECK(hc.residual < 1e-6);
  /* the equiaffine scale of this quadric puts the mean curvature at 2^(-4/5) */
  CHECK(std::fabs(hc.H_est - std::pow(2.0, -0.8)) < 1e-6);

  const BlaschkeData d = blaschke_data(s, pts.front());
  CHECK(d.negative_directions == 1);
  CHECK(d.theta_residual < 1e-6);
  CHECK(d.c_cross_residual < 1e-6);
  /* both curvature routes close the egregium identity */
  CHECK(std::fabs(d.kappa_hat - d.H_est - d.J) < 1e-6);
}

TEST_CASE("egregium and codazzi residuals vanish on a hypersphere") {
  const ImmersionSampler s = quadric_z2();
  const Vec3 p = s.domain.center();
  CHECK(egregium_residual(s, p) < 1e-6);
  CHECK(codazzi_residual(s, p) < 1e-4);
}

TEST_CASE("a graph with cubic terms is flagged as no hypersphere") {
  const ImmersionSampler s = bumpy_graph();
  const std::vector<Vec3> pts = grid_points(s.domain, 3, 3, 3);
  const HypersphereCheck hc = hypersphere_residual(s, pts);
  CHECK(hc.residual > 1e-3);
}

TEST_CASE("ricci route agrees with the weingarten route on a hypersphere") {
  const ImmersionSampler s = quadric_z2z2();
  const Vec3 p{0.05, -0.1, 0.12};
  const BlaschkeData d = blaschke_data(s, p);
  const auto [ric, scal] = ricci_and_scalar(s, p);
  /* scalar curvature normalized to kappa_hat must match the H + J route */
  CHECK(scal == doctest::Approx(d.H_est + d.J).epsilon(1e-5));
  (void)ric;
}

TEST_CASE("grid_points stays inside with the requested margin") {
  Box3 box;
  box.lo = Vec3{0.0, -1.0, 2.0};
  box.hi = Vec3{1.0, 1.0, 4.0};
  const auto pts = grid_points(box, 4, 3, 2, 0.1);
  CHECK(pts.size() == 24);
  for (const auto& p : pts) CHECK(box.contains(p, 0.0999999));
  /* a single-count axis sits at the center */
  const auto mid = grid_points(box, 1, 1, 1, 0.1);
  REQUIRE(mid.size() == 1);
  CHECK(norm(mid[0] - box.center()) < 1e-14);
}

TEST_CASE("symmetry_scan classifies the product quadric everywhere") {
  const ImmersionSampler s = quadric_z2z2();
  const auto pts = grid_points(s.domain, 3, 3, 3);
  const ScanReport rep = symmetry_scan(s, pts);
  REQUIRE(rep.points.size() == 27);
  for (const auto& p : rep.points) {
    CHECK(p.status == "ok");
    CHECK(p.cls.tag == SymmetryTag::Z2xZ2);
    CHECK(p.egregium < 1e-4);
    /* the quadric has vanishing curvature: H = -J pointwise */
    CHECK(std::fabs(p.H_point + p.J) < 1e-4);
    CHECK(std::fabs(p.kappa_hat) < 1e-4);
  }
  CHECK(rep.hypersphere_residual < 1e-6);
}

TEST_CASE("scan results do not depend on the thread count") {
  const ImmersionSampler s = quadric_z2();
  const auto pts = grid_points(s.domain, 2, 2, 2);
  const ScanReport a = symmetry_scan(s, pts, 1e-3, 1e-5, 1);
  const ScanReport b = symmetry_scan(s, pts, 1e-3, 1e-5, 4);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].cls.tag == b.points[i].cls.tag);
    CHECK(a.points[i].J == b.points[i].J);
    CHECK(a.points[i].kappa_hat == b.points[i].kappa_hat);
  }
}

TEST_CASE("scanning a definite surface reports the metric signature") {
  const ImmersionSampler s = unit_sphere();
  const auto pts = grid_points(s.domain, 2, 2, 2);
  CHECK_THROWS_AS((void)symmetry_scan(s, pts), DefiniteMetric);
}

TEST_CASE("unimodular affine maps leave the invariants alone") {
  /* push the quadric through a volume preserving shear; the blaschke data
     must transform equivariantly, so all scalar invariants stay put */
  const ImmersionSampler base = quadric_z2z2();
  ImmersionSampler moved = base;
  moved.evaluate = [inner = base.evaluate](double t, double v, double w) {
    const Vec4 x = inner(t, v, w);
    /* det = 1 by construction: triangular with unit diagonal */
    return Vec4{x[0] + 0.4 * x[1] - 0.2 * x[3],
                x[1] + 0.3 * x[2],
                x[2] - 0.5 * x[3],
                x[3]};
  };
  const Vec3 p{0.1, 0.07, -0.04};
  const BlaschkeData a = blaschke_data(base, p);
  const BlaschkeData b = blaschke_data(moved, p);
  CHECK(b.J == doctest::Approx(a.J).epsilon(1e-6));
  CHECK(b.H_est == doctest::Approx(a.H_est).epsilon(1e-6));
  CHECK(b.kappa_hat == doctest::Approx(a.kappa_hat).epsilon(1e-4));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(b.h(i, j) == doctest::Approx(a.h(i, j)).epsilon(1e-6));
}
