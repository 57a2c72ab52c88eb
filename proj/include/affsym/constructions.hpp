#pragma once

#include <functional>
#include <string>
#include <vector>

#include "affsym/blaschke.hpp"
#include "affsym/linalg.hpp"

namespace affsym {

/* planar profile curve with two derivatives; drives the warped products */
struct PlaneCurve {
  std::function<double(double)> g1, g2;      // components
  std::function<double(double)> dg1, dg2;    // first derivatives
  std::function<double(double)> ddg1, ddg2;  // second derivatives
  double t0 = 1.0, t1 = 2.0;                 // sampled interval
  std::string name;
};

enum class BaseTag {
  Ellipsoid,
  TwoSheetHyperboloid,
  OneSheetHyperboloid,
  EllipticParaboloidGraph,
  HyperbolicParaboloidGraph,
  Tzitzeica,
};

/* two-dimensional building block.  centered bases are affine spheres whose
   equiaffine normal is -epsilon1 * position; graph bases carry f(v,w) with
   unit Monge-Ampere determinant and normal (0,0,1), epsilon1 = 0. */
struct BaseSurface {
  BaseTag tag = BaseTag::Ellipsoid;
  int epsilon1 = 0;                              // sign of the mean curvature
  std::function<Vec3(double, double)> evaluate;  // position in R^3
  std::function<double(double, double)> graph;   // f(v,w), graph bases only
  double v0 = -0.5, v1 = 0.5, w0 = -0.5, w1 = 0.5;  // sampled patch
  std::string name;

  bool is_graph() const { return static_cast<bool>(graph); }
};

BaseSurface base_catalog(BaseTag tag);

/* which product construction a curve is meant for, and which symmetry class
   the construction targets.  the improper kinds share one curve identity;
   their displayed immersions use fixed polynomial profiles instead. */
enum class CaseKind { ProperWarped, ProperGraph, ImproperA, ImproperB };
enum class CaseFlavor { SO2, Z3, SO11 };

struct CaseTag {
  CaseKind kind = CaseKind::ProperWarped;
  CaseFlavor flavor = CaseFlavor::SO2;
};

struct CurveCondition {
  double max_residual = 0.0;  // worst |lhs - rhs| over the samples
  double min_lhs = 0.0;       // smallest |lhs|; certifies the nonvanishing clause
};

/* admissibility identity for the profile curve.  writing
   a = g1 g2' - g1' g2 and w2 = g1' g2'' - g1'' g2', the checked identity is

     ProperWarped            g2^2 |a|^5   = s * w2 * (g1')^2
     ImproperA / ImproperB   g2^2 |g2'|^5 = s * w2 * (g1')^2
     ProperGraph             g1^2 |a|^5   = s * w2 * (g1')^2

   where s = sign(g1' g2 epsilon1) for the definite-base flavors (SO2, Z3),
   s = -sign(g1 g1') for ProperGraph, and the SO11 flavor replaces the signed
   right side by |w2| (g1')^2 throughout. */
CurveCondition curve_condition_residual(const PlaneCurve& curve, CaseTag tag, int epsilon1,
                                        const std::vector<double>& samples);

/* product quadric (x1^2+x2^2)(x3^2+x4^2) = 1 via
   (e^u cos s, e^u sin s, e^-u cos r, e^-u sin r); two commuting reflections
   survive at every point */
ImmersionSampler quadric_z2z2();

/* mixed quadric (x1^2+x2^2)(x3^2-x4^2) = 1 via
   (e^u cos s, e^u sin s, e^-u cosh r, e^-u sinh r); one reflection survives */
ImmersionSampler quadric_z2();

/* radial product (g1(t), g2(t) * base(v,w)) over a centered definite base;
   Ellipsoid and TwoSheetHyperboloid target SO2, Tzitzeica targets Z3 */
ImmersionSampler warped_proper(const PlaneCurve& curve, const BaseSurface& base);

/* shifted graph product (g1 v, g1 w, g1 f(v,w) + g2, g1); the elliptic
   paraboloid targets SO2, the hyperbolic one SO11 */
ImmersionSampler warped_graph_proper(const PlaneCurve& curve, const BaseSurface& base);

/* fixed-profile improper families over a graph base, c > 0, t > 0:
   kind A gives (t v, t w, t f - c t^4, t), kind B gives (v, w, f + c t^3, t^4) */
ImmersionSampler improper_family(CaseKind kind, double c, const BaseSurface& base);

/* profile obtained by integrating the admissibility identity as a second
   order equation for g2 with g1(t) = t, starting at t = 1.  the sampled
   interval is trimmed before the first point where the identity degenerates
   (the elliptic branch blows up in finite time). */
PlaneCurve default_proper_curve(CaseTag tag, int epsilon1);

/* polynomial profile; coefficients in ascending powers of t */
PlaneCurve poly_curve(const std::vector<double>& coeff1, const std::vector<double>& coeff2,
                      double t0, double t1);

}  // namespace affsym
