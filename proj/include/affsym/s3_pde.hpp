#pragma once

#include <functional>
#include <string>
#include <vector>

#include "affsym/errors.hpp"

/* reduction of the threefold-symmetric hypersphere classes to scalar data:
   every such hypersurface is ruled over a flat (v,w)-plane, the remaining
   frame coefficients a22, a23, a6 are explicit in a coordinate t along the
   ruling, and the leftover functions h(v,w), k(v,w) satisfy one of six
   elliptic systems, one per mean-curvature sign and branch.  this module
   evaluates the coefficient families, checks their defining first-order
   equations in t, and relaxes the elliptic systems on a rectangle with
   Dirichlet data. */

namespace affsym {

enum class S3Branch { Generic, Exceptional };

struct S3Case {
  int H = -1;  // mean curvature sign, one of -1, 0, +1
  S3Branch branch = S3Branch::Generic;
};

/* short tag like "h-1.gen", used in file headers and the cli */
std::string s3_case_name(const S3Case& c);
S3Case s3_case_from_name(const std::string& name);

/* scalar unknowns on a uniform nx-by-ny grid over [0, (nx-1)*spacing] x
   [0, (ny-1)*spacing], row-major with x fastest.  the border entries are
   the Dirichlet data; solvers only ever touch interior nodes.  h is unused
   (kept empty) on the exceptional branch, which has a single unknown. */
struct GridField {
  int nx = 0, ny = 0;
  double spacing = 0.0;
  std::vector<double> h_values;
  std::vector<double> k_values;

  int index(int i, int j) const { return j * nx + i; }
  double x_of(int i) const { return i * spacing; }
  double y_of(int j) const { return j * spacing; }
};

/* right-hand sides of the case's system at one value pair.  generic cases
   fill both slots, exceptional ones only rhs_k. */
struct PdeRhs {
  double rhs_h = 0.0;
  double rhs_k = 0.0;
};
PdeRhs pde_rhs(const S3Case& c, double h, double k);

/* worst interior defect |five-point laplacian - rhs| over both equations */
double pde_residual(const S3Case& c, const GridField& f);

/* damped pointwise Newton relaxation with Gauss-Seidel ordering.  boundary
   supplies Dirichlet values (h, k) at border nodes; the initial interior
   guess is the harmonic extension of that data.  one iteration = one full
   lexicographic sweep.  throws DidNotConverge when max_iter sweeps fail to
   push pde_residual under tol. */
GridField s3_solve(const S3Case& c, int nx, int ny, double spacing,
                   const std::function<std::pair<double, double>(double, double)>& boundary,
                   int max_iter = 10000, double tol = 1e-6);

/* same relaxation, but starting from (and keeping the border of) an
   existing field, e.g. one loaded from disk */
GridField s3_solve_from(const S3Case& c, GridField start, int max_iter = 10000,
                        double tol = 1e-6);

struct FrameCoefficients {
  double a22 = 0.0;
  double a23 = 0.0;
  double a6 = 0.0;
};

/* closed-form coefficient family of the case along the ruling coordinate t,
   with the integration constants h, k (and phase l, normalizable to zero).
   exceptional branches use the upper sign of their two sign choices.
   throws SingularPoint where the generic denominators vanish. */
FrameCoefficients frame_coefficients(const S3Case& c, double t, double h, double k,
                                     double l = 0.0);

/* max defect of the three first-order equations T(a22) = -a22^2 + a23^2 + H,
   T(a23) = -2 a22 a23, T(ln a6) = -a22 over the samples, with T-derivatives
   taken by central differences of the closed forms (step 1e-5) */
double ode_consistency_residual(const S3Case& c, const std::vector<double>& t_samples,
                                double h, double k, double l = 0.0);

/* field csv is `x,y,h,k` with one row per node (h column zero on the
   exceptional branch); the json header records case, sizes, spacing and the
   residual at write time */
void write_field_csv(const GridField& f, const std::string& path);
void write_field_header_json(const S3Case& c, const GridField& f, double residual,
                             const std::string& path);
GridField read_field_csv(const std::string& path);

}  // namespace affsym
