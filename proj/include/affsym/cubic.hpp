#pragma once

#include <array>

#include "affsym/linalg.hpp"
#include "affsym/minkowski.hpp"

namespace affsym {

/* position of the sorted index triple (i <= j <= k) in the dense table */
int sym_index(int i, int j, int k);

/* number of distinct permutations of the triple behind dense slot d */
int sym_multiplicity(int d);

/* Totally symmetric trace-free cubic tensor attached to a point of an
   indefinite affine hypersphere: coordinates of the metric-lowered shape
   difference, stored as the ten independent components C_ijk with respect to
   the attached frame's basis, in lexicographic index order
   (000, 001, 002, 011, 012, 022, 111, 112, 122, 222).

   In an orthonormal representation the trace-free relations leave seven free
   coefficients a1..a7 = (C_ttt, C_ttv, C_ttw, C_tvv, C_tvw, C_vvv, C_vvw);
   in a light-vector representation they are b1..b7 =
   (C_eef, C_eev, C_eee, C_evf, C_eff, C_vff, C_fff). */
struct CubicForm {
  std::array<double, 10> dense{};
  Frame frame = Frame::reference_onb();

  static CubicForm from_onb_coeffs(const std::array<double, 7>& a,
                                   const Frame& fr = Frame::reference_onb());
  static CubicForm from_lvb_coeffs(const std::array<double, 7>& b,
                                   const Frame& fr = Frame::reference_lvb());

  /* read the free coefficients back; throws WrongFrameKind for a mismatched
     representation and NotAdmissible when the trace relations fail */
  std::array<double, 7> to_onb_coeffs(double tol = 1e-6) const;
  std::array<double, 7> to_lvb_coeffs(double tol = 1e-6) const;

  double operator()(const Vec3& x, const Vec3& y, const Vec3& z) const;

  /* K(x, y) with the last slot raised by the frame's pairing; components in
     the frame basis */
  Vec3 k_bilinear(const Vec3& x, const Vec3& y) const;

  /* pullback along g: result_ijk = sum C_abc g_ai g_bj g_ck, same frame */
  CubicForm act(const Mat3& g) const;

  /* re-express in another frame over the same reference coordinates */
  CubicForm in_frame(const Frame& target) const;

  /* worst violation of the trace-free relations */
  double apolarity_residual() const;

  /* euclidean norm over all 27 components */
  double norm() const;

  /* largest stored component in absolute value */
  double max_abs_value() const;
};

/* the scalar (1/6) <C, C> built with the pairing in all three slots; the
   sign carries the causal character of the tensor */
double j_invariant(const CubicForm& c);

/* max componentwise defect of pullback invariance under g */
double invariance_residual(const CubicForm& c, const Mat3& g);

}  // namespace affsym
