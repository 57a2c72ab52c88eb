#pragma once

#include "affsym/linalg.hpp"

/* the flat Lorentzian 3-space all classification work happens in.  vectors
   are always stored in coordinates of one fixed reference orthonormal basis
   with inner product diag(-1, 1, 1); a Frame is an ordered basis written in
   those coordinates together with the kind of pairing table it realizes. */

namespace affsym {

enum class FrameKind { ONB, LVB };

/* pairing tables: ONB diag(-1,1,1); LVB antidiag(1) with middle entry 1,
   i.e. <e,f> = 1, <v,v> = 1, everything else 0 for basis order (e, v, f) */
Mat3 gram_matrix(FrameKind kind);

/* inner product of coordinate vectors relative to a basis of the given kind */
double inner(const Vec3& a, const Vec3& b, FrameKind kind);

/* reference-coordinate (ONB) inner product */
inline double minkowski(const Vec3& a, const Vec3& b) { return inner(a, b, FrameKind::ONB); }

struct Frame {
  FrameKind kind = FrameKind::ONB;
  Vec3 basis[3];  // expressed in the reference ONB

  static Frame reference_onb();
  static Frame reference_lvb();

  Mat3 basis_matrix() const;  // columns are the basis vectors
  double orientation() const { return basis_matrix().det(); }

  /* max deviation of the pairing table from the kind's Gram matrix */
  double gram_residual() const;
  bool is_valid(double tol = 1e-9) const;
};

/* light-vector basis spanning the plane of a unit timelike t and unit
   spacelike w (assumed orthogonal): e = (t+w)/sqrt2, f = (-t+w)/sqrt2,
   v completes the basis.  inputs are renormalized; non-orthogonal or
   wrongly-signed inputs raise DegenerateInput. */
Frame lvb_of_timelike_plane(const Vec3& t, const Vec3& w, double tol = 1e-9);

/* deterministic completion of a unit timelike vector to a full ONB frame */
Frame complete_onb(const Vec3& t_unit, double tol = 1e-9);

/* deterministic ONB frame (t, v, w) around a unit spacelike middle leg */
Frame onb_about_spacelike(const Vec3& v_unit);

/* light-vector frame adapted to a two-step nilpotent pairing-compatible map:
   positively oriented (e, v, f) with n e = 0 and n v = -shear * e; the null
   rays and the Gram table come out exact by construction.  throws
   DegenerateInput when n is not usable (wrong rank, shear collapsed). */
struct NilpotentAdapted {
  Frame frame;
  double shear = 0.0;
};
NilpotentAdapted lvb_adapted_to_nilpotent(const Mat3& n, double tol = 1e-9);

/* rewrite a matrix between the two reference representations (same linear
   map, coordinates w.r.t. reference ONB vs reference LVB) */
Mat3 change_representation(const Mat3& m, FrameKind from, FrameKind to);

}  // namespace affsym
