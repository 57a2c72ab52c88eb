#include "affsym/minkowski.hpp"

#include <cmath>

#include "affsym/errors.hpp"

namespace affsym {

Mat3 gram_matrix(FrameKind kind) {
  if (kind == FrameKind::ONB) return Mat3::diagonal(-1.0, 1.0, 1.0);
  Mat3 G;
  G(0, 2) = 1.0;
  G(1, 1) = 1.0;
  G(2, 0) = 1.0;
  return G;
}

double inner(const Vec3& a, const Vec3& b, FrameKind kind) {
  if (kind == FrameKind::ONB) return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return a[0] * b[2] + a[2] * b[0] + a[1] * b[1];
}

Frame Frame::reference_onb() {
  Frame f;
  f.kind = FrameKind::ONB;
  f.basis[0] = {1, 0, 0};
  f.basis[1] = {0, 1, 0};
  f.basis[2] = {0, 0, 1};
  return f;
}

Frame Frame::reference_lvb() {
  /* the light-vector basis attached to the reference t and w directions */
  return lvb_of_timelike_plane({1, 0, 0}, {0, 0, 1});
}

Mat3 Frame::basis_matrix() const {
  return Mat3::from_columns(basis[0], basis[1], basis[2]);
}

double Frame::gram_residual() const {
  const Mat3 G = gram_matrix(kind);
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r = std::max(r, std::fabs(minkowski(basis[i], basis[j]) - G(i, j)));
  return r;
}

bool Frame::is_valid(double tol) const {
  return gram_residual() <= tol && orientation() > 0.0;
}

Frame lvb_of_timelike_plane(const Vec3& t, const Vec3& w, double tol) {
  const double tt = minkowski(t, t);
  const double ww = minkowski(w, w);
  if (tt >= -tol) throw DegenerateInput("first vector is not timelike");
  if (ww <= tol) throw DegenerateInput("second vector is not spacelike");
  const Vec3 tu = t / std::sqrt(-tt);
  Vec3 wu = w / std::sqrt(ww);
  if (std::fabs(minkowski(tu, wu)) > 1e-6)
    throw DegenerateInput("input vectors are not orthogonal");
  /* absorb any tiny residual so the Gram table comes out exact */
  wu += tu * minkowski(tu, wu);
  wu = wu / std::sqrt(minkowski(wu, wu));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Frame f;
  f.kind = FrameKind::LVB;
  f.basis[0] = (tu + wu) * inv_sqrt2;   // e
  f.basis[2] = (wu - tu) * inv_sqrt2;   // f
  /* with Gram G, the vector G * (t x w) pairs to zero with both t and w */
  Vec3 v = cross(tu, wu);
  v[0] = -v[0];
  const double vv = minkowski(v, v);
  if (vv <= tol) throw DegenerateInput("cannot complete light-vector basis");
  v = v / std::sqrt(vv);
  f.basis[1] = v;
  if (f.orientation() < 0.0) f.basis[1] = -v;
  return f;
}

Frame complete_onb(const Vec3& t_unit, double tol) {
  const double tt = minkowski(t_unit, t_unit);
  if (tt >= -tol) throw DegenerateInput("not a timelike direction");
  const Vec3 t = t_unit / std::sqrt(-tt);

  /* pick the coordinate axis least aligned with t, project, normalize */
  Frame f;
  f.kind = FrameKind::ONB;
  f.basis[0] = t;
  const Vec3 seeds[3] = {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  int got = 0;
  for (const Vec3& s : seeds) {
    Vec3 u = s;
    u += t * minkowski(t, u);  // subtract the (negative-norm) t component
    for (int j = 0; j < got; ++j) u -= f.basis[1 + j] * minkowski(f.basis[1 + j], u);
    const double uu = minkowski(u, u);
    if (uu > tol) {
      f.basis[1 + got] = u / std::sqrt(uu);
      if (++got == 2) break;
    }
  }
  if (got != 2) throw DegenerateInput("failed to complete an orthonormal frame");
  if (f.orientation() < 0.0) f.basis[2] = -f.basis[2];
  return f;
}

Frame onb_about_spacelike(const Vec3& v_unit) {
  /* project the reference time axis off v; the result is always timelike
     because <t0,t0> = -1 - <v,t>^2 */
  Vec3 t0{1, 0, 0};
  t0 -= v_unit * minkowski(v_unit, t0);
  const Vec3 t = t0 / std::sqrt(-minkowski(t0, t0));
  Vec3 w = cross(t, v_unit);
  w[0] = -w[0];  // Gram twist makes the euclidean normal pairing-orthogonal
  w = w / std::sqrt(minkowski(w, w));
  Frame f;
  f.kind = FrameKind::ONB;
  f.basis[0] = t;
  f.basis[1] = v_unit;
  f.basis[2] = w;
  if (f.orientation() < 0.0) f.basis[2] = -f.basis[2];
  return f;
}

Mat3 change_representation(const Mat3& m, FrameKind from, FrameKind to) {
  if (from == to) return m;
  const Mat3 p = Frame::reference_lvb().basis_matrix();
  if (from == FrameKind::LVB) return p * m * inverse(p);  // LVB -> ONB
  return inverse(p) * m * p;                              // ONB -> LVB
}

NilpotentAdapted lvb_adapted_to_nilpotent(const Mat3& n, double tol) {
  const Mat3 n2 = n * n;

  /* seed with the coordinate direction n^2 moves the most; its image spans
     the null ray e, one application earlier gives the middle leg */
  int seed = 0;
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double len = norm(n2.column(i));
    if (len > best) { best = len; seed = i; }
  }
  if (best <= tol) throw DegenerateInput("map does not have a two-step nilpotent part");
  Vec3 fs{0, 0, 0};
  fs[seed] = 1.0;
  Vec3 e = n2 * fs;
  e = e / norm(e);
  Vec3 v = n * fs;
  const double vv = minkowski(v, v);
  if (vv <= tol) throw DegenerateInput("middle leg is not spacelike");
  v = v / std::sqrt(vv);
  double shear = -dot(n * v, e) / dot(e, e);
  if (std::fabs(shear) <= tol) throw DegenerateInput("shear coefficient collapsed");

  /* fill the last leg from the Gram conditions <e,f> = 1, <v,f> = 0,
     <f,f> = 0 in the basis (e, v, g) with an auxiliary independent g */
  Vec3 g = cross(e, v);
  double eg = minkowski(e, g);
  if (std::fabs(eg) < 1e-8) {
    g = Vec3{1, 0, 0};
    eg = minkowski(e, g);
    if (std::fabs(eg) < 1e-8) {
      g = Vec3{0, 1, 0};
      eg = minkowski(e, g);
    }
  }
  const double z = 1.0 / eg;
  const double y = -z * minkowski(v, g);
  const double x = -(y * y + z * z * minkowski(g, g) + 2.0 * y * z * minkowski(v, g)) / (2.0 * z * eg);
  const Vec3 f = e * x + v * y + g * z;

  NilpotentAdapted out;
  out.frame.kind = FrameKind::LVB;
  out.frame.basis[0] = e;
  out.frame.basis[1] = v;
  out.frame.basis[2] = f;
  out.shear = shear;
  if (out.frame.orientation() < 0.0) {
    out.frame.basis[1] = -v;
    out.shear = -shear;
  }
  return out;
}

}  // namespace affsym
