#include "affsym/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <thread>
#include <unordered_map>

#include "affsym/errors.hpp"
#include "affsym/minkowski.hpp"

namespace affsym {

namespace {

constexpr double kDegenerateDet = 1e-12;

/* second partials live at pair slots tt,tv,tw,vv,vw,ww */
constexpr int kPair[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

/* sorted index triples in dense storage order */
constexpr int kTriple[10][3] = {{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 1}, {0, 1, 2},
                                {0, 2, 2}, {1, 1, 1}, {1, 1, 2}, {1, 2, 2}, {2, 2, 2}};

/* every evaluation in one call sits on a lattice with spacing step/2 around
   the base point; memoizing the samples makes the composed stencils cheap
   and keeps repeated legs bit-identical */
struct LatticeCache {
  const ImmersionSampler* phi = nullptr;
  Vec3 origin;
  double unit = 0.0;
  std::unordered_map<std::int64_t, Vec4> memo;

  Vec4 at(int i, int j, int k) {
    const std::int64_t key =
        (static_cast<std::int64_t>(i) + 512) +
        1024 * ((static_cast<std::int64_t>(j) + 512) + 1024 * (static_cast<std::int64_t>(k) + 512));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const Vec4 v = phi->evaluate(origin[0] + unit * i, origin[1] + unit * j, origin[2] + unit * k);
    memo.emplace(key, v);
    return v;
  }
};

struct Offset {
  int c[3];
  Offset shifted(int axis, int by) const {
    Offset o = *this;
    o.c[axis] += by;
    return o;
  }
};

Vec4 sample(LatticeCache& lat, const Offset& o) { return lat.at(o.c[0], o.c[1], o.c[2]); }

/* plain central stencils at integer scale m (step = m * lattice unit) */

Vec4 diff1(LatticeCache& lat, const Offset& c, int axis, int m) {
  const double d = 2.0 * m * lat.unit;
  return (sample(lat, c.shifted(axis, m)) - sample(lat, c.shifted(axis, -m))) / d;
}

Vec4 diff2_pure(LatticeCache& lat, const Offset& c, int axis, int m) {
  const double d = m * lat.unit;
  return (sample(lat, c.shifted(axis, m)) - 2.0 * sample(lat, c) +
          sample(lat, c.shifted(axis, -m))) /
         (d * d);
}

Vec4 diff2_mixed(LatticeCache& lat, const Offset& c, int a, int b, int m) {
  const double d = m * lat.unit;
  return (sample(lat, c.shifted(a, m).shifted(b, m)) + sample(lat, c.shifted(a, -m).shifted(b, -m)) -
          sample(lat, c.shifted(a, m).shifted(b, -m)) -
          sample(lat, c.shifted(a, -m).shifted(b, m))) /
         (4.0 * d * d);
}

Vec4 diff3_pure(LatticeCache& lat, const Offset& c, int axis, int m) {
  const double d = m * lat.unit;
  return (sample(lat, c.shifted(axis, 2 * m)) - 2.0 * sample(lat, c.shifted(axis, m)) +
          2.0 * sample(lat, c.shifted(axis, -m)) - sample(lat, c.shifted(axis, -2 * m))) /
         (2.0 * d * d * d);
}

/* d^2/da^2 d/db as a central difference of pure second stencils */
Vec4 diff3_iij(LatticeCache& lat, const Offset& c, int a, int b, int m) {
  const double d = 2.0 * m * lat.unit;
  return (diff2_pure(lat, c.shifted(b, m), a, m) - diff2_pure(lat, c.shifted(b, -m), a, m)) / d;
}

Vec4 diff3_distinct(LatticeCache& lat, const Offset& c, int m) {
  const double d = m * lat.unit;
  Vec4 acc;
  for (int s0 = -1; s0 <= 1; s0 += 2)
    for (int s1 = -1; s1 <= 1; s1 += 2)
      for (int s2 = -1; s2 <= 1; s2 += 2) {
        const Vec4 v = sample(lat, c.shifted(0, s0 * m).shifted(1, s1 * m).shifted(2, s2 * m));
        acc += (s0 * s1 * s2 > 0) ? v : -v;
      }
  return acc / (8.0 * d * d * d);
}

Vec4 richardson(const Vec4& coarse, const Vec4& fine) { return (4.0 * fine - coarse) / 3.0; }

/* jet with one Richardson level; m2 governs first/second partials, m3 the
   third partials (both even; m3 additionally divisible by 4) */
Jet lattice_jet(LatticeCache& lat, const Offset& c, int m2, int m3, bool third) {
  Jet jet;
  jet.point = Vec3{lat.origin[0] + lat.unit * c.c[0], lat.origin[1] + lat.unit * c.c[1],
                   lat.origin[2] + lat.unit * c.c[2]};
  jet.value = sample(lat, c);
  for (int a = 0; a < 3; ++a)
    jet.d1[a] = richardson(diff1(lat, c, a, m2), diff1(lat, c, a, m2 / 2));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const Vec4 v = (i == j)
                         ? richardson(diff2_pure(lat, c, i, m2), diff2_pure(lat, c, i, m2 / 2))
                         : richardson(diff2_mixed(lat, c, i, j, m2), diff2_mixed(lat, c, i, j, m2 / 2));
      jet.d2[kPair[i][j]] = v;
    }
  if (third) {
    jet.has_third = true;
    for (int t = 0; t < 10; ++t) {
      const int a = kTriple[t][0], b = kTriple[t][1], d = kTriple[t][2];
      Vec4 v;
      if (a == b && b == d)
        v = richardson(diff3_pure(lat, c, a, m3), diff3_pure(lat, c, a, m3 / 2));
      else if (a == b)
        v = richardson(diff3_iij(lat, c, a, d, m3), diff3_iij(lat, c, a, d, m3 / 2));
      else if (b == d)
        v = richardson(diff3_iij(lat, c, b, a, m3), diff3_iij(lat, c, b, a, m3 / 2));
      else
        v = richardson(diff3_distinct(lat, c, m3), diff3_distinct(lat, c, m3 / 2));
      jet.d3[t] = v;
    }
  }
  return jet;
}

/* scales used by the full pipeline, in lattice units (unit = step/2) */
constexpr int kScale2 = 2;        // first/second partials at step
constexpr int kScale3 = 16;       // third partials at 8*step
constexpr int kNeighbor = 48;     // normal/connection field differencing at 24*step

double quad_form(const Mat3& g, const Vec3& a, const Vec3& b) { return dot(a, g * b); }

/* pointwise invariant chain up to the difference tensor; S and kappa_hat
   need neighboring copies of this and are assembled by the caller */
struct Core {
  Jet jet;
  Mat3 G;
  double det_G = 0.0;
  double sigma = 1.0;
  double omega = 0.0;
  int negative_directions = 0;
  Mat3 h, h_inv;
  double dh[3][3][3];     // dh[k][i][j] = d_k h_ij
  double gamma_hat[3][3][3];
  Vec4 xi;
  double theta_residual = 0.0;
  double gamma[3][3][3];  // induced connection (filled when with_k)
  std::array<Mat3, 3> K{};
  std::array<double, 10> C_low{};
  double apolarity_residual = 0.0;
  double c_cross_residual = 0.0;
};

Core compute_core(LatticeCache& lat, const Offset& at, bool with_k) {
  Core core;
  core.jet = lattice_jet(lat, at, kScale2, kScale3, true);
  const auto& d1 = core.jet.d1;
  const auto& d2 = core.jet.d2;
  const auto& d3 = core.jet.d3;

  /* metric candidate: component of phi_ij transversal to the tangent plane,
     measured against the unimodular volume */
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const double g = det4(d1[0], d1[1], d1[2], d2[kPair[i][j]]);
      core.G(i, j) = core.G(j, i) = g;
    }
  core.det_G = core.G.det();
  if (std::fabs(core.det_G) < kDegenerateDet)
    throw DegenerateHypersurface("metric determinant below cutoff at sampled point");

  const SymEigen3 eg = sym_eigen(core.G);
  int neg_raw = 0;
  for (double lam : eg.lambda)
    if (lam < 0.0) ++neg_raw;
  core.sigma = (neg_raw >= 2) ? -1.0 : 1.0;
  core.negative_directions = (core.sigma > 0.0) ? neg_raw : 3 - neg_raw;

  const double scale = core.sigma * std::pow(std::fabs(core.det_G), -0.2);
  core.omega = std::pow(std::fabs(core.det_G), 0.2);
  core.h = core.G * scale;
  core.h_inv = inverse(core.h);

  /* derivative of G: move the derivative through each determinant column */
  double dG[3][3][3];
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const Vec4& pij = d2[kPair[i][j]];
        double v = det4(d2[kPair[0][k]], d1[1], d1[2], pij) +
                   det4(d1[0], d2[kPair[1][k]], d1[2], pij) +
                   det4(d1[0], d1[1], d2[kPair[2][k]], pij) +
                   det4(d1[0], d1[1], d1[2], d3[sym_index(i, j, k)]);
        dG[k][i][j] = dG[k][j][i] = v;
      }

  for (int k = 0; k < 3; ++k) {
    /* G^{-1} = scale * h^{-1} */
    double tr = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) tr += scale * core.h_inv(a, b) * dG[k][a][b];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        core.dh[k][i][j] = scale * (dG[k][i][j] - 0.2 * tr * core.G(i, j));
  }

  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
          s += core.h_inv(l, m) * (core.dh[i][m][j] + core.dh[j][m][i] - core.dh[m][i][j]);
        core.gamma_hat[l][i][j] = 0.5 * s;
      }

  /* Blaschke normal as one third of the metric Laplacian of the position */
  Vec4 lap;
  double tangential[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      lap += core.h_inv(i, j) * d2[kPair[i][j]];
      for (int l = 0; l < 3; ++l) tangential[l] += core.h_inv(i, j) * core.gamma_hat[l][i][j];
    }
  for (int l = 0; l < 3; ++l) lap -= tangential[l] * d1[l];
  core.xi = lap / 3.0;

  const double theta = det4(d1[0], d1[1], d1[2], core.xi);
  core.theta_residual = std::fabs(std::fabs(theta) - core.omega);

  if (!with_k) return core;

  /* induced connection: second partials decomposed along tangents + normal */
  const Mat4 basis = Mat4::from_columns(d1[0], d1[1], d1[2], core.xi);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const Vec4 x = basis.solve(d2[kPair[i][j]]);
      for (int l = 0; l < 3; ++l) core.gamma[l][i][j] = core.gamma[l][j][i] = x[l];
    }
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) core.K[l](i, j) = core.gamma[l][i][j] - core.gamma_hat[l][i][j];

  for (int t = 0; t < 10; ++t) {
    const int i = kTriple[t][0], j = kTriple[t][1], k = kTriple[t][2];
    double acc = 0.0;
    for (int l = 0; l < 3; ++l) acc += core.K[l](i, j) * core.h(l, k);
    core.C_low[t] = acc;
  }

  double c_scale = 1.0;
  for (double v : core.C_low) c_scale = std::max(c_scale, std::fabs(v));
  for (int l = 0; l < 3; ++l) {
    double tr = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tr += core.h_inv(i, j) * core.C_low[sym_index(i, j, l)];
    core.apolarity_residual = std::max(core.apolarity_residual, std::fabs(tr) / c_scale);
  }

  /* cross-check: the derivative-of-metric route to the cubic form must match
     -2 h(K(.,.),.) entry by entry (this also checks total symmetry) */
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        double nabla_h = core.dh[k][i][j];
        for (int l = 0; l < 3; ++l)
          nabla_h -= core.gamma[l][k][i] * core.h(l, j) + core.gamma[l][k][j] * core.h(i, l);
        double lowered = 0.0;
        for (int l = 0; l < 3; ++l) lowered += core.K[l](i, j) * core.h(l, k);
        core.c_cross_residual =
            std::max(core.c_cross_residual, std::fabs(nabla_h + 2.0 * lowered));
      }
  return core;
}

double pick_invariant(const std::array<double, 10>& c_low, const Mat3& h_inv) {
  double c[3][3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j][k] = c_low[sym_index(i, j, k)];
  double up1[3][3][3], up2[3][3][3], up3[3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += h_inv(a, i) * c[i][j][k];
        up1[a][j][k] = s;
      }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += h_inv(b, j) * up1[a][j][k];
        up2[a][b][k] = s;
      }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 3; ++d) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += h_inv(d, k) * up2[a][b][k];
        up3[a][b][d] = s;
      }
  double j_sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) j_sum += c[i][j][k] * up3[i][j][k];
  return j_sum / 6.0;
}

struct FieldDerivatives {
  Vec4 dxi[3];
  double dgamma_hat[3][3][3][3];  // [k][l][i][j] = d_k gamma_hat^l_ij
};

/* difference the normal and connection fields at 24*step with one Richardson
   level; every sampled point reuses the shared lattice cache */
FieldDerivatives field_derivatives(LatticeCache& lat, double step) {
  FieldDerivatives fd;
  for (int k = 0; k < 3; ++k) {
    Offset o{{0, 0, 0}};
    const Core pc = compute_core(lat, o.shifted(k, kNeighbor), false);
    const Core mc = compute_core(lat, o.shifted(k, -kNeighbor), false);
    const Core ph = compute_core(lat, o.shifted(k, kNeighbor / 2), false);
    const Core mh = compute_core(lat, o.shifted(k, -kNeighbor / 2), false);
    const double d_big = 2.0 * (kNeighbor / 2.0) * step;  // spacing 24*step
    const double d_half = 0.5 * d_big;
    const Vec4 coarse = (pc.xi - mc.xi) / d_big;
    const Vec4 fine = (ph.xi - mh.xi) / d_half;
    fd.dxi[k] = richardson(coarse, fine);
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double c = (pc.gamma_hat[l][i][j] - mc.gamma_hat[l][i][j]) / d_big;
          const double f = (ph.gamma_hat[l][i][j] - mh.gamma_hat[l][i][j]) / d_half;
          fd.dgamma_hat[k][l][i][j] = (4.0 * f - c) / 3.0;
        }
  }
  return fd;
}

LatticeCache make_cache(const ImmersionSampler& phi, const Vec3& p, double step) {
  if (!(step > 0.0)) throw IllegalParameter("step must be positive");
  if (!phi.domain.contains(p, blaschke_margin(step) * (1.0 - 1e-12)))
    throw OutOfDomain("point too close to the domain boundary for the stencil reach");
  LatticeCache lat;
  lat.phi = &phi;
  lat.origin = p;
  lat.unit = 0.5 * step;
  return lat;
}

}  // namespace

Jet numeric_jet(const ImmersionSampler& phi, const Vec3& p, double step, int order) {
  if (!(step > 0.0)) throw IllegalParameter("step must be positive");
  if (order != 2 && order != 3) throw IllegalParameter("jet order must be 2 or 3");
  if (!phi.domain.contains(p, 2.0 * step * (1.0 - 1e-12)))
    throw OutOfDomain("point too close to the domain boundary for the stencil reach");
  LatticeCache lat;
  lat.phi = &phi;
  lat.origin = p;
  lat.unit = 0.5 * step;
  return lattice_jet(lat, Offset{{0, 0, 0}}, 2, 2, order == 3);
}

BlaschkeData blaschke_data(const ImmersionSampler& phi, const Vec3& p, double step) {
  LatticeCache lat = make_cache(phi, p, step);
  const Core core = compute_core(lat, Offset{{0, 0, 0}}, true);
  const FieldDerivatives fd = field_derivatives(lat, step);

  BlaschkeData out;
  out.h = core.h;
  out.negative_directions = core.negative_directions;
  out.xi = core.xi;
  out.K = core.K;
  out.C_low = core.C_low;
  out.theta_residual = core.theta_residual;
  out.apolarity_residual = core.apolarity_residual;
  out.c_cross_residual = core.c_cross_residual;
  out.J = pick_invariant(core.C_low, core.h_inv);

  const Mat4 basis =
      Mat4::from_columns(core.jet.d1[0], core.jet.d1[1], core.jet.d1[2], core.xi);
  for (int k = 0; k < 3; ++k) {
    const Vec4 x = basis.solve(-fd.dxi[k]);
    for (int l = 0; l < 3; ++l) out.S(l, k) = x[l];
    out.weingarten_residual = std::max(out.weingarten_residual, std::fabs(x[3]));
  }
  out.H_est = out.S.trace() / 3.0;

  /* scalar curvature of the metric from its differenced connection */
  Mat3 ric;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l)
        s += fd.dgamma_hat[l][l][i][j] - fd.dgamma_hat[i][l][l][j];
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
          s += core.gamma_hat[l][l][m] * core.gamma_hat[m][i][j] -
               core.gamma_hat[l][i][m] * core.gamma_hat[m][l][j];
      ric(i, j) = s;
    }
  double kh = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kh += core.h_inv(i, j) * ric(i, j);
  out.kappa_hat = kh / 6.0;
  return out;
}

std::pair<Mat3, double> ricci_and_scalar(const ImmersionSampler& phi, const Vec3& p,
                                         double step) {
  const BlaschkeData bd = blaschke_data(phi, p, step);
  const Mat3 dev = bd.S - Mat3::identity() * bd.H_est;
  if (max_abs(dev) > 1e-3)
    throw NotAHypersphere("shape operator is not a multiple of the identity at this point");

  /* Gauss identity route: Ric(X,Y) = 2 H h(X,Y) + tr(K_X K_Y) */
  Mat3 ric;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 2.0 * bd.H_est * bd.h(i, j);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += bd.K[a](i, b) * bd.K[b](j, a);
      ric(i, j) = s;
    }
  const Mat3 h_inv = inverse(bd.h);
  double kh = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kh += h_inv(i, j) * ric(i, j);
  return {ric, kh / 6.0};
}

HypersphereCheck hypersphere_residual(const ImmersionSampler& phi,
                                      const std::vector<Vec3>& points, double step) {
  if (points.empty()) throw IllegalParameter("need at least one point");
  std::vector<BlaschkeData> data;
  data.reserve(points.size());
  for (const Vec3& p : points) data.push_back(blaschke_data(phi, p, step));

  HypersphereCheck out;
  for (const BlaschkeData& bd : data) out.H_est += bd.H_est;
  out.H_est /= static_cast<double>(data.size());
  for (const BlaschkeData& bd : data) {
    out.residual = std::max(out.residual, max_abs(bd.S - Mat3::identity() * out.H_est));
    out.residual = std::max(out.residual, std::fabs(bd.H_est - out.H_est));
  }
  return out;
}

double egregium_residual(const ImmersionSampler& phi, const Vec3& p, double step) {
  const BlaschkeData bd = blaschke_data(phi, p, step);
  return std::fabs(bd.kappa_hat - bd.H_est - bd.J);
}

double codazzi_residual(const ImmersionSampler& phi, const Vec3& p, double step) {
  LatticeCache lat = make_cache(phi, p, step);
  const Core core = compute_core(lat, Offset{{0, 0, 0}}, true);

  double dK[3][3][3][3];  // [k][l][i][j] = d_k K^l_ij
  for (int k = 0; k < 3; ++k) {
    Offset o{{0, 0, 0}};
    const Core pc = compute_core(lat, o.shifted(k, kNeighbor), true);
    const Core mc = compute_core(lat, o.shifted(k, -kNeighbor), true);
    const Core ph = compute_core(lat, o.shifted(k, kNeighbor / 2), true);
    const Core mh = compute_core(lat, o.shifted(k, -kNeighbor / 2), true);
    const double d_big = 2.0 * (kNeighbor / 2.0) * step;
    const double d_half = 0.5 * d_big;
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double c = (pc.K[l](i, j) - mc.K[l](i, j)) / d_big;
          const double f = (ph.K[l](i, j) - mh.K[l](i, j)) / d_half;
          dK[k][l][i][j] = (4.0 * f - c) / 3.0;
        }
  }

  /* covariant derivative in coordinates, then the X <-> Y antisymmetry test */
  double cov[3][3][3][3];
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = dK[k][l][i][j];
          for (int m = 0; m < 3; ++m)
            s += core.gamma_hat[l][k][m] * core.K[m](i, j) -
                 core.gamma_hat[m][k][i] * core.K[l](m, j) -
                 core.gamma_hat[m][k][j] * core.K[l](i, m);
          cov[k][l][i][j] = s;
        }
  double defect = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = k + 1; i < 3; ++i)
      for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j)
          defect = std::max(defect, std::fabs(cov[k][l][i][j] - cov[i][l][k][j]));
  return defect;
}

namespace {

/* deterministic (-,+,+) frame from the metric: timelike leg from the most
   negative coordinate direction (eigen fallback when no coordinate axis is
   timelike), then pivoted Gram-Schmidt over the remaining axes */
std::array<Vec3, 3> lorentz_frame(const Mat3& h) {
  const Vec3 axes[3] = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  int seed = 0;
  for (int i = 1; i < 3; ++i)
    if (h(i, i) < h(seed, seed)) seed = i;
  Vec3 t = axes[seed];
  if (h(seed, seed) >= 0.0) t = sym_eigen(h).vec[0];
  const double qt = quad_form(h, t, t);
  if (qt >= 0.0) throw DefiniteMetric("no timelike direction found in the affine metric");
  t = t / std::sqrt(-qt);

  Vec3 cand[3];
  double cand_q[3];
  int n = 0;
  for (const Vec3& a : axes) {
    Vec3 x = a + quad_form(h, a, t) * t;  // h-projection off t (h(t,t) = -1)
    const double q = quad_form(h, x, x);
    cand[n] = x;
    cand_q[n] = q;
    ++n;
  }
  int iv = 0;
  for (int i = 1; i < 3; ++i)
    if (cand_q[i] > cand_q[iv]) iv = i;
  if (cand_q[iv] <= 0.0) throw DefiniteMetric("metric is not Lorentzian");
  const Vec3 v = cand[iv] / std::sqrt(cand_q[iv]);

  double best = -1.0;
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    if (i == iv) continue;
    Vec3 x = cand[i] - quad_form(h, cand[i], v) * v;
    const double q = quad_form(h, x, x);
    if (q > best) {
      best = q;
      w = x;
    }
  }
  if (best <= 0.0) throw DefiniteMetric("metric is not Lorentzian");
  return {t, v, w / std::sqrt(best)};
}

ScanPoint scan_point(const ImmersionSampler& phi, const Vec3& p, double step, double tol,
                     Mat3* shape_out) {
  const BlaschkeData bd = blaschke_data(phi, p, step);
  *shape_out = bd.S;
  if (bd.negative_directions != 1)
    throw DefiniteMetric("affine metric is definite at a scan point");

  const std::array<Vec3, 3> fr = lorentz_frame(bd.h);
  double c_coord[3][3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c_coord[i][j][k] = bd.C_low[sym_index(i, j, k)];

  CubicForm form;
  form.frame = Frame::reference_onb();
  for (int t = 0; t < 10; ++t) {
    const Vec3& a = fr[kTriple[t][0]];
    const Vec3& b = fr[kTriple[t][1]];
    const Vec3& c = fr[kTriple[t][2]];
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) acc += c_coord[i][j][k] * a[i] * b[j] * c[k];
    form.dense[t] = acc;
  }

  ScanPoint sp;
  sp.point = p;
  sp.cls = stabilizer_classify(form, tol);
  sp.status = (sp.cls.tag == SymmetryTag::NumericallyAmbiguous) ? "ambiguous" : "ok";
  sp.J = bd.J;
  sp.kappa_hat = bd.kappa_hat;
  sp.H_point = bd.H_est;
  sp.egregium = std::fabs(bd.kappa_hat - bd.H_est - bd.J);
  return sp;
}

}  // namespace

ScanReport symmetry_scan(const ImmersionSampler& phi, const std::vector<Vec3>& grid,
                         double step, double tol, int threads) {
  if (grid.empty()) throw IllegalParameter("empty scan grid");
  threads = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));

  ScanReport report;
  report.points.resize(grid.size());
  std::vector<Mat3> shapes(grid.size());

  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](int id) {
    try {
      for (std::size_t i = id; i < grid.size(); i += threads)
        report.points[i] = scan_point(phi, grid[i], step, tol, &shapes[i]);
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int id = 0; id < threads; ++id) pool.emplace_back(worker, id);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  for (const ScanPoint& sp : report.points) report.H_est += sp.H_point;
  report.H_est /= static_cast<double>(report.points.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.hypersphere_residual = std::max(
        report.hypersphere_residual, max_abs(shapes[i] - Mat3::identity() * report.H_est));
    report.hypersphere_residual = std::max(
        report.hypersphere_residual, std::fabs(report.points[i].H_point - report.H_est));
  }
  return report;
}

std::vector<Vec3> grid_points(const Box3& box, int nt, int nv, int nw, double margin) {
  if (nt < 1 || nv < 1 || nw < 1) throw IllegalParameter("grid sizes must be positive");
  auto coords = [&](double lo, double hi, int n) {
    std::vector<double> xs;
    xs.reserve(n);
    const double a = lo + margin, b = hi - margin;
    if (b < a) throw IllegalParameter("margin exceeds box size");
    if (n == 1) {
      xs.push_back(0.5 * (a + b));
    } else {
      for (int i = 0; i < n; ++i) xs.push_back(a + (b - a) * i / (n - 1));
    }
    return xs;
  };
  const std::vector<double> ts = coords(box.lo[0], box.hi[0], nt);
  const std::vector<double> vs = coords(box.lo[1], box.hi[1], nv);
  const std::vector<double> ws = coords(box.lo[2], box.hi[2], nw);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(nt) * nv * nw);
  for (double t : ts)
    for (double v : vs)
      for (double w : ws) pts.push_back(Vec3{t, v, w});
  return pts;
}

}  // namespace affsym
