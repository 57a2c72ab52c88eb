#include "affsym/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "affsym/errors.hpp"

namespace affsym {
namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

double horner(const std::vector<double>& c, double t) {
  double r = 0.0;
  for (size_t i = c.size(); i-- > 0;) r = r * t + c[i];
  return r;
}

std::vector<double> derive(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
  return d;
}

struct CurveSamples {
  double min_g1 = 1e300, min_g2 = 1e300, min_alpha = 1e300, max_abs = 0.0;
};

CurveSamples sample_curve(const PlaneCurve& c, int n = 200) {
  CurveSamples s;
  for (int i = 0; i < n; ++i) {
    const double t = c.t0 + (c.t1 - c.t0) * (double(i) + 0.5) / double(n);
    const double g1 = c.g1(t), g2 = c.g2(t);
    const double a = g1 * c.dg2(t) - c.dg1(t) * g2;
    s.min_g1 = std::min(s.min_g1, std::fabs(g1));
    s.min_g2 = std::min(s.min_g2, std::fabs(g2));
    s.min_alpha = std::min(s.min_alpha, std::fabs(a));
    s.max_abs = std::max({s.max_abs, std::fabs(g1), std::fabs(g2)});
  }
  return s;
}

/* dense output of the profile integration: cubic pieces matched to stored
   value/derivative pairs at every node */
struct CurveNode {
  double y, yp, ypp;
};

struct DenseCurve {
  double t0 = 1.0, h = 1e-4;
  std::vector<CurveNode> nodes;

  const CurveNode& pick(double t, double& u, double& ta) const {
    double idx = std::floor((t - t0) / h);
    idx = std::clamp(idx, 0.0, double(nodes.size()) - 2.0);
    ta = t0 + idx * h;
    u = (t - ta) / h;
    return nodes[size_t(idx)];
  }

  double hermite(double t, bool deriv) const {
    double u, ta;
    const CurveNode& n0 = pick(t, u, ta);
    const CurveNode& n1 = (&n0)[1];
    const double f0 = deriv ? n0.yp : n0.y, f1 = deriv ? n1.yp : n1.y;
    const double d0 = deriv ? n0.ypp : n0.yp, d1 = deriv ? n1.ypp : n1.yp;
    const double u2 = u * u, um = 1.0 - u;
    return f0 * (1.0 + 2.0 * u) * um * um + d0 * h * u * um * um + f1 * u2 * (3.0 - 2.0 * u) +
           d1 * h * u2 * (u - 1.0);
  }
};

using Rhs = std::function<double(double, double, double)>;

/* integrate y'' = F(t, y, y') from t = 1 with a fixed-step classical
   Runge-Kutta scheme, stopping at t_max or at the first sign of the
   admissibility clause failing (the elliptic branch blows up in finite time) */
PlaneCurve integrate_profile(const Rhs& F, double y0, double yp0, bool guard_g2,
                             const std::string& name) {
  const double t_max = 2.0, h = 1e-4;
  auto dense = std::make_shared<DenseCurve>();
  dense->t0 = 1.0;
  dense->h = h;
  dense->nodes.push_back({y0, yp0, F(1.0, y0, yp0)});

  double t = 1.0, y = y0, yp = yp0;
  bool complete = false;
  for (;;) {
    if (t >= t_max - 1e-12) {
      complete = true;
      break;
    }
    const double k1y = yp, k1p = F(t, y, yp);
    const double k2y = yp + 0.5 * h * k1p, k2p = F(t + 0.5 * h, y + 0.5 * h * k1y, k2y);
    const double k3y = yp + 0.5 * h * k2p, k3p = F(t + 0.5 * h, y + 0.5 * h * k2y, k3y);
    const double k4y = yp + h * k3p, k4p = F(t + h, y + h * k3y, k4y);
    const double yn = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    const double ypn = yp + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    const double tn = t + h;
    const double a = tn * ypn - yn;
    if (!std::isfinite(yn) || !std::isfinite(ypn)) break;
    if (a < 0.25 || a > 4.0) break;
    if (std::fabs(yn) > 25.0 || std::fabs(ypn) > 25.0) break;
    if (guard_g2 && std::fabs(yn) < 0.2) break;
    t = tn;
    y = yn;
    yp = ypn;
    dense->nodes.push_back({y, yp, F(t, y, yp)});
  }

  const double t_end = complete ? t_max : 1.0 + 0.9 * (t - 1.0);
  if (t_end - 1.0 < 0.12)
    throw IllegalCurve("profile integration left the admissible region almost immediately");

  PlaneCurve c;
  c.t0 = 1.0;
  c.t1 = t_end;
  c.name = name;
  c.g1 = [](double s) { return s; };
  c.dg1 = [](double) { return 1.0; };
  c.ddg1 = [](double) { return 0.0; };
  c.g2 = [dense](double s) { return dense->hermite(s, false); };
  c.dg2 = [dense](double s) { return dense->hermite(s, true); };
  c.ddg2 = [dense, F](double s) { return F(s, dense->hermite(s, false), dense->hermite(s, true)); };
  return c;
}

}  // namespace

BaseSurface base_catalog(BaseTag tag) {
  BaseSurface b;
  b.tag = tag;
  switch (tag) {
    case BaseTag::Ellipsoid:
      b.epsilon1 = +1;
      b.evaluate = [](double v, double w) {
        return Vec3{std::cos(v) * std::cos(w), std::sin(v) * std::cos(w), std::sin(w)};
      };
      b.v0 = -0.6, b.v1 = 0.6, b.w0 = -0.5, b.w1 = 0.5;
      b.name = "ellipsoid";
      break;
    case BaseTag::TwoSheetHyperboloid:
      b.epsilon1 = -1;
      b.evaluate = [](double v, double w) {
        return Vec3{std::sqrt(1.0 + v * v + w * w), v, w};
      };
      b.v0 = -0.6, b.v1 = 0.6, b.w0 = -0.6, b.w1 = 0.6;
      b.name = "two-sheet-hyperboloid";
      break;
    case BaseTag::OneSheetHyperboloid:
      b.epsilon1 = -1;
      b.evaluate = [](double v, double w) {
        return Vec3{v, std::sqrt(1.0 + v * v - w * w), w};
      };
      b.v0 = -0.6, b.v1 = 0.6, b.w0 = -0.6, b.w1 = 0.6;
      b.name = "one-sheet-hyperboloid";
      break;
    case BaseTag::Tzitzeica: {
      const double s = 1.0 / std::sqrt(3.0);
      b.epsilon1 = -1;
      b.evaluate = [s](double v, double w) {
        return Vec3{s * std::exp(v), s * std::exp(w), s * std::exp(-v - w)};
      };
      b.v0 = -0.5, b.v1 = 0.5, b.w0 = -0.5, b.w1 = 0.5;
      b.name = "tzitzeica";
      break;
    }
    case BaseTag::EllipticParaboloidGraph:
      b.epsilon1 = 0;
      b.graph = [](double v, double w) { return 0.5 * (v * v + w * w); };
      b.v0 = -0.8, b.v1 = 0.8, b.w0 = -0.8, b.w1 = 0.8;
      b.name = "elliptic-paraboloid";
      break;
    case BaseTag::HyperbolicParaboloidGraph:
      b.epsilon1 = 0;
      b.graph = [](double v, double w) { return 0.5 * (v * v - w * w); };
      b.v0 = -0.8, b.v1 = 0.8, b.w0 = -0.8, b.w1 = 0.8;
      b.name = "hyperbolic-paraboloid";
      break;
  }
  if (b.graph) {
    auto f = b.graph;
    b.evaluate = [f](double v, double w) { return Vec3{v, w, f(v, w)}; };
  }
  return b;
}

CurveCondition curve_condition_residual(const PlaneCurve& curve, CaseTag tag, int epsilon1,
                                        const std::vector<double>& samples) {
  CurveCondition out;
  out.min_lhs = 1e300;
  for (const double t : samples) {
    const double g1 = curve.g1(t), g2 = curve.g2(t);
    const double d1 = curve.dg1(t), d2 = curve.dg2(t);
    const double s1 = curve.ddg1(t), s2 = curve.ddg2(t);
    const double a = g1 * d2 - d1 * g2;
    const double w2 = d1 * s2 - s1 * d2;

    double lhs = 0.0;
    switch (tag.kind) {
      case CaseKind::ProperWarped:
        lhs = g2 * g2 * std::pow(std::fabs(a), 5.0);
        break;
      case CaseKind::ImproperA:
      case CaseKind::ImproperB:
        lhs = g2 * g2 * std::pow(std::fabs(d2), 5.0);
        break;
      case CaseKind::ProperGraph:
        lhs = g1 * g1 * std::pow(std::fabs(a), 5.0);
        break;
    }

    double rhs;
    if (tag.flavor == CaseFlavor::SO11) {
      rhs = std::fabs(w2) * d1 * d1;
    } else if (tag.kind == CaseKind::ProperGraph) {
      rhs = -double(sgn(g1 * d1)) * w2 * d1 * d1;
    } else {
      rhs = double(sgn(d1 * g2 * double(epsilon1))) * w2 * d1 * d1;
    }

    out.max_residual = std::max(out.max_residual, std::fabs(lhs - rhs));
    out.min_lhs = std::min(out.min_lhs, std::fabs(lhs));
  }
  if (samples.empty()) out.min_lhs = 0.0;
  return out;
}

ImmersionSampler quadric_z2z2() {
  ImmersionSampler s;
  s.name = "quadric-z2z2";
  s.expected_class = "Z2xZ2";
  s.evaluate = [](double u, double a, double r) {
    const double e = std::exp(u), ei = std::exp(-u);
    return Vec4{e * std::cos(a), e * std::sin(a), ei * std::cos(r), ei * std::sin(r)};
  };
  s.domain.lo = Vec3{-0.5, -0.5, -0.5};
  s.domain.hi = Vec3{0.5, 0.5, 0.5};
  return s;
}

ImmersionSampler quadric_z2() {
  ImmersionSampler s;
  s.name = "quadric-z2";
  s.expected_class = "Z2B";
  s.evaluate = [](double u, double a, double r) {
    const double e = std::exp(u), ei = std::exp(-u);
    return Vec4{e * std::cos(a), e * std::sin(a), ei * std::cosh(r), ei * std::sinh(r)};
  };
  s.domain.lo = Vec3{-0.5, -0.5, -0.5};
  s.domain.hi = Vec3{0.5, 0.5, 0.5};
  return s;
}

ImmersionSampler warped_proper(const PlaneCurve& curve, const BaseSurface& base) {
  if (base.tag != BaseTag::Ellipsoid && base.tag != BaseTag::TwoSheetHyperboloid &&
      base.tag != BaseTag::Tzitzeica)
    throw IllegalParameter("radial products need a centered definite base");
  const CurveSamples cs = sample_curve(curve);
  const double floor = 1e-9 * std::max(1.0, cs.max_abs);
  if (cs.min_g2 < floor) throw IllegalCurve("g2 vanishes on the sampled interval");
  if (cs.min_alpha < floor) throw IllegalCurve("g1 g2' - g1' g2 vanishes on the sampled interval");

  ImmersionSampler s;
  s.name = "warped-proper:" + base.name;
  s.expected_class = base.tag == BaseTag::Tzitzeica ? "Z3" : "SO2";
  auto g1 = curve.g1;
  auto g2 = curve.g2;
  auto bs = base.evaluate;
  s.evaluate = [g1, g2, bs](double t, double v, double w) {
    const Vec3 b = bs(v, w);
    const double r = g2(t);
    return Vec4{g1(t), r * b[0], r * b[1], r * b[2]};
  };
  s.domain.lo = Vec3{curve.t0, base.v0, base.w0};
  s.domain.hi = Vec3{curve.t1, base.v1, base.w1};
  return s;
}

ImmersionSampler warped_graph_proper(const PlaneCurve& curve, const BaseSurface& base) {
  if (!base.is_graph()) throw IllegalParameter("graph products need a graph base");
  const CurveSamples cs = sample_curve(curve);
  const double floor = 1e-9 * std::max(1.0, cs.max_abs);
  if (cs.min_g1 < floor) throw IllegalCurve("g1 vanishes on the sampled interval");
  if (cs.min_alpha < floor) throw IllegalCurve("g1 g2' - g1' g2 vanishes on the sampled interval");

  ImmersionSampler s;
  s.name = "warped-graph:" + base.name;
  s.expected_class = base.tag == BaseTag::HyperbolicParaboloidGraph ? "SO11" : "SO2";
  auto g1 = curve.g1;
  auto g2 = curve.g2;
  auto f = base.graph;
  s.evaluate = [g1, g2, f](double t, double v, double w) {
    const double r = g1(t);
    return Vec4{r * v, r * w, r * f(v, w) + g2(t), r};
  };
  s.domain.lo = Vec3{curve.t0, base.v0, base.w0};
  s.domain.hi = Vec3{curve.t1, base.v1, base.w1};
  return s;
}

ImmersionSampler improper_family(CaseKind kind, double c, const BaseSurface& base) {
  if (kind != CaseKind::ImproperA && kind != CaseKind::ImproperB)
    throw IllegalParameter("improper_family expects kind ImproperA or ImproperB");
  if (!(c > 0.0)) throw IllegalParameter("improper families need c > 0");
  if (!base.is_graph()) throw IllegalParameter("improper families need a graph base");

  ImmersionSampler s;
  s.expected_class = base.tag == BaseTag::HyperbolicParaboloidGraph ? "SO11" : "SO2";
  s.expected_mean_curvature = 0.0;
  auto f = base.graph;
  if (kind == CaseKind::ImproperA) {
    s.name = "improper-a:" + base.name;
    s.evaluate = [f, c](double t, double v, double w) {
      return Vec4{t * v, t * w, t * f(v, w) - c * t * t * t * t, t};
    };
  } else {
    s.name = "improper-b:" + base.name;
    s.evaluate = [f, c](double t, double v, double w) {
      return Vec4{v, w, f(v, w) + c * t * t * t, t * t * t * t};
    };
  }
  s.domain.lo = Vec3{0.7, base.v0, base.w0};
  s.domain.hi = Vec3{1.5, base.v1, base.w1};
  return s;
}

PlaneCurve default_proper_curve(CaseTag tag, int epsilon1) {
  if (tag.kind == CaseKind::ProperGraph) {
    /* g1 = t makes the graph identity read y'' = -t^2 |t y' - y|^5.  every
       start on the line y'(1) = y(1) + 1 integrates to y = (A t^2 - 1)/(2 t),
       whose hypersurface is a quadric with a vanishing cubic form, so the
       start value is kept off that line on purpose */
    Rhs F = [](double t, double y, double yp) {
      const double a = t * yp - y;
      return -t * t * std::pow(std::fabs(a), 5.0);
    };
    return integrate_profile(F, 0.0, 0.5, false, "ode-graph");
  }
  if (tag.kind != CaseKind::ProperWarped)
    throw IllegalParameter("default profiles exist for the proper cases only");

  Rhs F;
  std::string name;
  double y0 = 1.0, yp0 = 2.0;
  if (tag.flavor == CaseFlavor::SO11) {
    /* the boost-symmetric identity fixes |y''|; take the decaying branch */
    F = [](double t, double y, double yp) {
      const double a = t * yp - y;
      return -y * y * std::pow(std::fabs(a), 5.0);
    };
    name = "ode-warped-abs";
  } else {
    if (epsilon1 != 1 && epsilon1 != -1)
      throw IllegalParameter("radial profiles need the base mean curvature sign");
    const double e = double(epsilon1);
    F = [e](double t, double y, double yp) {
      const double a = t * yp - y;
      return double(sgn(e * y)) * y * y * std::pow(std::fabs(a), 5.0);
    };
    name = epsilon1 > 0 ? "ode-warped-elliptic" : "ode-warped-hyperbolic";
    if (epsilon1 > 0) {
      /* the growing branch over an elliptic base blows up before t = 2;
         a start in the decaying regime covers the whole interval.  these
         values also avoid the quadric solutions, which have y (t y' - y)
         equal to +-2^(-1/4) */
      y0 = -1.0;
      yp0 = -0.5;
    }
  }
  return integrate_profile(F, y0, yp0, true, name);
}

PlaneCurve poly_curve(const std::vector<double>& coeff1, const std::vector<double>& coeff2,
                      double t0, double t1) {
  if (!(t1 > t0)) throw IllegalParameter("poly_curve needs t1 > t0");
  PlaneCurve c;
  c.t0 = t0;
  c.t1 = t1;
  c.name = "poly";
  const std::vector<double> d1 = derive(coeff1), d2 = derive(coeff2);
  const std::vector<double> s1 = derive(d1), s2 = derive(d2);
  c.g1 = [coeff1](double t) { return horner(coeff1, t); };
  c.g2 = [coeff2](double t) { return horner(coeff2, t); };
  c.dg1 = [d1](double t) { return horner(d1, t); };
  c.dg2 = [d2](double t) { return horner(d2, t); };
  c.ddg1 = [s1](double t) { return horner(s1, t); };
  c.ddg2 = [s2](double t) { return horner(s2, t); };
  return c;
}

}  // namespace affsym
