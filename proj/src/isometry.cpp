#include "affsym/isometry.hpp"

#include <cmath>

#include "affsym/errors.hpp"

namespace affsym {

double isometry_residual(const Isometry& m) {
  const Mat3 g = gram_matrix(m.kind);
  const Mat3 defect = m.matrix.transpose() * g * m.matrix - g;
  return std::max(max_abs(defect), std::fabs(m.matrix.det() - 1.0));
}

bool is_special_isometry(const Isometry& m, double tol) {
  return isometry_residual(m) <= tol;
}

Isometry to_kind(const Isometry& m, FrameKind kind) {
  if (m.kind == kind) return m;
  return {change_representation(m.matrix, m.kind, kind), kind};
}

const char* family_name(IsometryFamily f) {
  switch (f) {
    case IsometryFamily::Identity: return "Identity";
    case IsometryFamily::Rotation: return "Rotation";
    case IsometryFamily::HalfTurn: return "HalfTurn";
    case IsometryFamily::SpacelikeReflection: return "SpacelikeReflection";
    case IsometryFamily::Boost: return "Boost";
    case IsometryFamily::Parabolic: return "Parabolic";
    case IsometryFamily::ShearedBoost: return "ShearedBoost";
  }
  return "?";
}

Isometry make_normal_form(IsometryFamily family, double p1, double p2) {
  Mat3 m;
  switch (family) {
    case IsometryFamily::Identity:
      return {Mat3::identity(), FrameKind::ONB};
    case IsometryFamily::Rotation: {
      const double two_pi = 2.0 * M_PI;
      if (!(p1 > 0.0 && p1 < two_pi) || p1 == M_PI)
        throw IllegalParameter("rotation angle must lie in (0, 2pi) \\ {pi}");
      m = Mat3::identity();
      m(1, 1) = std::cos(p1);
      m(1, 2) = -std::sin(p1);
      m(2, 1) = std::sin(p1);
      m(2, 2) = std::cos(p1);
      return {m, FrameKind::ONB};
    }
    case IsometryFamily::HalfTurn:
      return {Mat3::diagonal(1.0, -1.0, -1.0), FrameKind::ONB};
    case IsometryFamily::SpacelikeReflection:
      /* the same numerical matrix works in both representations */
      return {Mat3::diagonal(-1.0, 1.0, -1.0), FrameKind::ONB};
    case IsometryFamily::Boost:
      if (p1 == 0.0 || p1 == 1.0 || p1 == -1.0)
        throw IllegalParameter("boost factor must avoid 0 and +-1");
      return {Mat3::diagonal(p1, 1.0, 1.0 / p1), FrameKind::LVB};
    case IsometryFamily::Parabolic:
      p1 = 1.0;
      p2 = 1.0;
      [[fallthrough]];
    case IsometryFamily::ShearedBoost: {
      const double l = p1, shear = p2;
      if (l == 0.0 || shear == 0.0)
        throw IllegalParameter("sheared boost needs l != 0 and m != 0");
      m(0, 0) = l;
      m(0, 1) = -l * shear;
      m(0, 2) = -l * shear * shear / 2.0;
      m(1, 1) = 1.0;
      m(1, 2) = shear;
      m(2, 2) = 1.0 / l;
      return {m, FrameKind::LVB};
    }
  }
  throw IllegalParameter("unknown family");
}

namespace {

/* normal-form matrices used for the residual check */
Mat3 expected_form(IsometryFamily f, double p) {
  switch (f) {
    case IsometryFamily::Identity: return Mat3::identity();
    case IsometryFamily::Rotation: return make_normal_form(f, p).matrix;
    case IsometryFamily::HalfTurn: return Mat3::diagonal(1, -1, -1);
    case IsometryFamily::SpacelikeReflection: return Mat3::diagonal(-1, 1, -1);
    case IsometryFamily::Boost: return Mat3::diagonal(p, 1, 1 / p);
    case IsometryFamily::Parabolic: return make_normal_form(f).matrix;
    default: break;
  }
  return Mat3::identity();
}

Mat3 in_frame(const Mat3& m_onb, const Frame& f) {
  const Mat3 b = f.basis_matrix();
  return inverse(b) * m_onb * b;
}

double frame_form_residual(const Mat3& m_onb, const Frame& f, const Mat3& nf) {
  return max_abs(in_frame(m_onb, f) - nf);
}

IsometryClass classify_rotation_like(const Mat3& m, double tol) {
  /* fixed axis: kernel of m - id */
  Vec3 u = null_direction(m - Mat3::identity());
  const double q = minkowski(u, u);
  if (q >= -tol) throw NumericallyAmbiguous("rotation axis is not clearly timelike");
  Vec3 t = u / std::sqrt(-q);

  Frame f = complete_onb(t);
  const Vec3 mv = m * f.basis[1];
  const double c = minkowski(mv, f.basis[1]);
  const double s = minkowski(mv, f.basis[2]);
  double angle = std::atan2(s, c);
  if (angle < 0.0) {
    /* fold to the (0, pi) branch: flip axis and third leg together so the
       frame stays positively oriented */
    f.basis[0] = -f.basis[0];
    f.basis[2] = -f.basis[2];
    angle = -angle;
  }
  if (angle < tol || M_PI - angle < tol)
    throw NumericallyAmbiguous("rotation angle too close to 0 or pi");

  IsometryClass out;
  out.family = IsometryFamily::Rotation;
  out.parameter = angle;
  out.adapted_frame = f;
  out.residual = frame_form_residual(m, f, expected_form(out.family, angle));
  return out;
}

IsometryClass classify_boost(const Mat3& m, double l, double tol) {
  Vec3 e = null_direction(m - Mat3::identity() * l);
  Vec3 f = null_direction(m - Mat3::identity() * (1.0 / l));
  Vec3 v = null_direction(m - Mat3::identity());
  const double vv = minkowski(v, v);
  if (vv <= tol) throw NumericallyAmbiguous("boost fixed direction not clearly spacelike");
  v = v / std::sqrt(vv);

  double ef = minkowski(e, f);
  if (std::fabs(ef) <= tol) throw NumericallyAmbiguous("degenerate null eigenvectors");
  if (ef < 0.0) { f = -f; ef = -ef; }
  /* normalize <e,f> = 1, balancing the euclidean lengths to stay scale free */
  const double alpha = std::sqrt(norm(f) / (ef * norm(e)));
  e = e * alpha;
  f = f / (alpha * ef);
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::fabs(e[i]) > std::fabs(e[imax])) imax = i;
  if (e[imax] < 0.0) { e = -e; f = -f; }

  Frame fr;
  fr.kind = FrameKind::LVB;
  fr.basis[0] = e;
  fr.basis[1] = v;
  fr.basis[2] = f;
  if (fr.orientation() < 0.0) fr.basis[1] = -v;

  IsometryClass out;
  out.family = IsometryFamily::Boost;
  out.parameter = l;
  out.adapted_frame = fr;
  out.residual = frame_form_residual(m, fr, expected_form(out.family, l));
  return out;
}

IsometryClass classify_parabolic(const Mat3& m, double tol) {
  const Mat3 n = m - Mat3::identity();
  if (max_abs(n * n) <= std::sqrt(tol))
    throw NumericallyAmbiguous("neither identity nor clearly parabolic");

  NilpotentAdapted na;
  try {
    na = lvb_adapted_to_nilpotent(n, tol);
  } catch (const DegenerateInput& err) {
    throw NumericallyAmbiguous(err.what());
  }
  /* scaling the null legs by the shear turns the frame matrix into the
     unit-shear normal form */
  Frame fr = na.frame;
  fr.basis[0] = fr.basis[0] * na.shear;
  fr.basis[2] = fr.basis[2] / na.shear;

  IsometryClass out;
  out.family = IsometryFamily::Parabolic;
  out.adapted_frame = fr;
  out.residual = frame_form_residual(m, fr, expected_form(out.family, 0.0));
  return out;
}

IsometryClass classify_double_negative(const Mat3& m, double tol) {
  /* eigenvalues 1, -1, -1: half turn about a timelike axis or the spacelike
     reflection, told apart by the causal type of the fixed direction */
  const Vec3 u = null_direction(m - Mat3::identity());
  const double q = minkowski(u, u);
  if (std::fabs(q) <= tol)
    throw NumericallyAmbiguous("fixed direction of involution is nearly null");

  IsometryClass out;
  if (q < 0.0) {
    const Vec3 t = u / std::sqrt(-q);
    out.family = IsometryFamily::HalfTurn;
    out.adapted_frame = complete_onb(t);
  } else {
    const Vec3 v = u / std::sqrt(q);
    out.family = IsometryFamily::SpacelikeReflection;
    out.adapted_frame = onb_about_spacelike(v);
  }
  out.residual = frame_form_residual(m, out.adapted_frame, expected_form(out.family, 0.0));
  return out;
}

}  // namespace

IsometryClass classify_isometry(const Isometry& iso, double tol) {
  if (!is_special_isometry(iso, std::max(tol, 1e-12) * 100.0))
    throw NotAnIsometry("matrix does not preserve the pairing with determinant one");
  const Mat3 m = to_kind(iso, FrameKind::ONB).matrix;

  const double tau = m.trace();
  /* eigenvalues are 1 and the root pair of x^2 - (tau-1) x + 1; the pair's
     discriminant separates rotations (complex) from boosts (real) */
  const double disc = (tau - 1.0) * (tau - 1.0) - 4.0;
  /* conjugating an exact normal form smears the discriminant by rounding of
     order 1e-13; anything inside this band is treated as a repeated root */
  const double band = std::max(4.0 * tol * tol, 1e-10);

  IsometryClass out;
  if (disc < -band) {
    out = classify_rotation_like(m, tol);
  } else if (disc > band) {
    const double half = (tau - 1.0) / 2.0;
    const double root = std::sqrt(disc) / 2.0;
    const double l = (half >= 0.0) ? half + root : half - root;  // |l| > 1 branch
    if (std::fabs(std::fabs(l) - 1.0) < tol)
      throw NumericallyAmbiguous("boost factor too close to +-1");
    out = classify_boost(m, l, tol);
  } else if (tau > 0.0) {
    if (max_abs(m - Mat3::identity()) <= 100.0 * tol) {
      out.family = IsometryFamily::Identity;
      out.adapted_frame = Frame::reference_onb();
      out.residual = max_abs(m - Mat3::identity());
    } else {
      out = classify_parabolic(m, tol);
    }
  } else {
    out = classify_double_negative(m, tol);
  }

  if (out.residual > 10.0 * tol &&
      out.residual > 1e-10)  // floor for exactly-representable forms
    throw NumericallyAmbiguous("adapted frame fails to reproduce the normal form");
  return out;
}

}  // namespace affsym
