#pragma once

#include <map>
#include <string>

#include "affsym/cubic.hpp"

namespace affsym {

/* conjugacy class of the pointwise stabilizer of an admissible cubic tensor
   inside the connected isometry group of the pairing */
enum class SymmetryTag {
  FullSO12,   // zero tensor, everything fixes it
  SO2,        // rotations about a timelike axis
  SO11,       // boosts about a spacelike axis
  RLine,      // a one-parameter group of parabolic elements
  S3,         // dihedral of order six about a timelike axis
  Z3,         // cyclic of order three about a timelike axis
  Z2xZ2,      // half turn plus two spacelike reflections
  Z2Api,      // half turn about a timelike axis only
  Z2B,        // one spacelike reflection only
  Trivial,    // identity only
  NumericallyAmbiguous,
};

const char* tag_name(SymmetryTag t);

struct SymmetryClass {
  SymmetryTag tag = SymmetryTag::NumericallyAmbiguous;

  /* frame in which the tensor takes its canonical coefficient pattern;
     reference frame for FullSO12 / Trivial / ambiguous results */
  Frame frame = Frame::reference_onb();

  /* canonical free coefficients of the pattern, keyed a1..a7 / b4 / b7 */
  std::map<std::string, double> params;

  /* worst invariance defect of the advertised generators, measured on the
     tensor rescaled to unit norm */
  double generator_residual = 0.0;

  /* worst deviation of the actual components in `frame` from the pattern
     rebuilt out of `params` alone */
  double fit_residual = 0.0;

  /* smallest clearance any thresholded decision had on the way here; small
     values mean the answer was nearly flipped by noise */
  double margin = 0.0;
};

/* full two-stage classification: a linearized probe for one-parameter
   subgroups first, then a Newton search for the finite candidates.  `tol`
   bounds the acceptable invariance defect of a generator on the unit-norm
   tensor; the default suits exact coefficient input, while tensors coming
   out of finite differencing should be classified with the scan tolerance
   (1e-5).  inconclusive inputs come back tagged NumericallyAmbiguous rather
   than as an exception. */
SymmetryClass stabilizer_classify(const CubicForm& c, double tol = 1e-8);

}  // namespace affsym
