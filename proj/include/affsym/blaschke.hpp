#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affsym/cubic.hpp"
#include "affsym/linalg.hpp"
#include "affsym/stabilizer.hpp"

/* finite-difference equiaffine invariants of an immersed hypersurface
   U c R^3 -> R^4: affine metric, Blaschke normal, shape operator, difference
   tensor, curvature identities, and per-point symmetry scans. */

namespace affsym {

struct Box3 {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{0.0, 0.0, 0.0};

  bool contains(const Vec3& p, double margin = 0.0) const {
    for (int i = 0; i < 3; ++i)
      if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
    return true;
  }
  Vec3 center() const { return (lo + hi) * 0.5; }
};

/* a parameterized patch; evaluate must be smooth on the open box and safely
   callable from several threads at once (pure function of its arguments) */
struct ImmersionSampler {
  std::function<Vec4(double, double, double)> evaluate;
  Box3 domain;
  std::string name;
  std::optional<double> expected_mean_curvature;
  std::string expected_class;  // advertised scan tag, empty when unknown

  Vec4 operator()(const Vec3& p) const { return evaluate(p[0], p[1], p[2]); }
};

/* partial derivatives at a point.  second partials are stored in pair order
   tt,tv,tw,vv,vw,ww and third partials in lexicographic triple order (same
   layout as CubicForm::sym_index); mixed entries are symmetric by
   construction of the stencils. */
struct Jet {
  Vec3 point;
  Vec4 value;
  std::array<Vec4, 3> d1{};
  std::array<Vec4, 6> d2{};
  std::array<Vec4, 10> d3{};
  bool has_third = false;
};

/* central differences with one Richardson extrapolation level at a uniform
   step; order 3 adds the third partials.  needs the box to contain p with
   margin 2*step (the widest stencil leg). */
Jet numeric_jet(const ImmersionSampler& phi, const Vec3& p, double step, int order = 2);

struct BlaschkeData {
  Mat3 h;                       // affine metric in the coordinate basis
  int negative_directions = 0;  // 1 = signature (-,+,+), 0 = definite
  Vec4 xi;                      // Blaschke normal
  Mat3 S;                       // shape operator, coordinate basis
  std::array<Mat3, 3> K{};      // K[l](i,j) = component along d_l of K(d_i,d_j)
  std::array<double, 10> C_low{};  // h(K(d_i,d_j),d_k), dense symmetric storage
  double J = 0.0;               // Pick invariant h(K,K)/6
  double kappa_hat = 0.0;       // scalar curvature from differentiated metric data
  double H_est = 0.0;           // trace(S)/3
  double theta_residual = 0.0;  // | |det(tangents,xi)| - metric volume |
  double apolarity_residual = 0.0;
  double c_cross_residual = 0.0;    // nabla-h route cubic form vs -2 h(K.,.)
  double weingarten_residual = 0.0; // transversal leak of the differenced normal
};

/* full invariant set at one point.  first and second partials use `step`,
   third partials a coarser 8*step (kills the 1/step^3 roundoff), and the
   normal/connection fields are differenced at 24*step; everything lands on a
   step/2 lattice shared through one evaluation cache.  total stencil reach
   is 40*step per axis. */
BlaschkeData blaschke_data(const ImmersionSampler& phi, const Vec3& p, double step = 1e-3);

/* margin the box must leave around a blaschke_data point */
inline double blaschke_margin(double step) { return 40.0 * step; }

/* Ricci tensor and scalar curvature assembled algebraically from the Gauss
   identity of a hypersphere (needs S close to a multiple of the identity) */
std::pair<Mat3, double> ricci_and_scalar(const ImmersionSampler& phi, const Vec3& p,
                                         double step = 1e-3);

struct HypersphereCheck {
  double H_est = 0.0;    // average of trace(S)/3 over the points
  double residual = 0.0; // worst deviation of S from H_est * Id
};
HypersphereCheck hypersphere_residual(const ImmersionSampler& phi,
                                      const std::vector<Vec3>& points, double step = 1e-3);

/* |kappa_hat - H - J| at one point; the left side comes from differenced
   metric data, the right from the Weingarten and Pick routes */
double egregium_residual(const ImmersionSampler& phi, const Vec3& p, double step = 1e-3);

/* worst antisymmetry defect of the covariant derivative of the K field */
double codazzi_residual(const ImmersionSampler& phi, const Vec3& p, double step = 1e-3);

struct ScanPoint {
  Vec3 point;
  std::string status;  // "ok" or "ambiguous"
  SymmetryClass cls;
  double J = 0.0;
  double kappa_hat = 0.0;
  double H_point = 0.0;   // trace(S)/3 at this point
  double egregium = 0.0;  // |kappa_hat - H_point - J|
};

struct ScanReport {
  std::vector<ScanPoint> points;
  double H_est = 0.0;
  double hypersphere_residual = 0.0;
};

/* classify the pointwise symmetry at every grid point: h-orthonormalize a
   (-,+,+) frame, express K in it as a cubic form, and run the stabilizer
   classifier.  throws DefiniteMetric when h is not Lorentzian at some point. */
ScanReport symmetry_scan(const ImmersionSampler& phi, const std::vector<Vec3>& grid,
                         double step = 1e-3, double tol = 1e-5, int threads = 1);

/* uniform grid strictly inside the box, `margin` in from every face */
std::vector<Vec3> grid_points(const Box3& box, int nt, int nv, int nw, double margin = 0.05);

}  // namespace affsym
