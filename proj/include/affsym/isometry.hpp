#pragma once

#include <optional>
#include <string>

#include "affsym/minkowski.hpp"

/* elements of the special isometry group of the Lorentzian pairing and
   their conjugacy normal forms.  a matrix is always stored together with
   the representation it is written in: ONB entries pair through
   diag(-1,1,1), LVB entries through the light-vector table. */

namespace affsym {

struct Isometry {
  Mat3 matrix;
  FrameKind kind = FrameKind::ONB;
};

/* max-norm defect of M^T G M = G plus |det - 1| */
double isometry_residual(const Isometry& m);
bool is_special_isometry(const Isometry& m, double tol = 1e-9);

/* rewrite into the other reference representation (same abstract map) */
Isometry to_kind(const Isometry& m, FrameKind kind);

enum class IsometryFamily {
  Identity,
  Rotation,             // A_t, t in (0,2pi) \ {pi}, ONB
  HalfTurn,             // A_pi = diag(1,-1,-1), ONB
  SpacelikeReflection,  // diag(-1,1,-1) in either representation
  Boost,                // C_l = diag(l, 1, 1/l), LVB, |l| > 1 canonical
  Parabolic,            // C_1 = [[1,-1,-1/2],[0,1,1],[0,0,1]], LVB
  ShearedBoost,         // C_{l,m} = [[l,-lm,-lm^2/2],[0,1,m],[0,0,1/l]], LVB
};

const char* family_name(IsometryFamily f);

/* normal-form constructor.  parameter p1 is the rotation angle or boost
   factor, p2 the shear of a ShearedBoost.  rotations are built in the ONB
   representation, boost-like families in the LVB one.  invalid parameters
   (angle 0 or pi, boost factor 0 or +-1, zero shear) raise IllegalParameter. */
Isometry make_normal_form(IsometryFamily family, double p1 = 0.0, double p2 = 0.0);

struct IsometryClass {
  IsometryFamily family = IsometryFamily::Identity;
  std::optional<double> parameter;  // angle in (0, pi) or boost factor with |l| > 1
  Frame adapted_frame;              // M acts as the normal form in this frame
  double residual = 0.0;            // entrywise gap to the normal form in the frame
};

/* decide the conjugacy family of a special isometry and produce an adapted,
   positively oriented frame realizing the normal form.  the rotation angle
   is reported on the branch (0, pi): the two angles t and 2pi - t describe
   conjugate maps, so only this folded value is recoverable from the matrix.
   boost factors are canonicalized to |l| > 1.  throws NotAnIsometry for
   inputs failing is_special_isometry, NumericallyAmbiguous when the
   eigenvalue structure sits within tol of a family boundary. */
IsometryClass classify_isometry(const Isometry& m, double tol = 1e-9);

}  // namespace affsym
