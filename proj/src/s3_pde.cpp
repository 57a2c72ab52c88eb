#include "affsym/s3_pde.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "affsym/json_out.hpp"

namespace affsym {

namespace {

void validate_case(const S3Case& c) {
  if (c.H != -1 && c.H != 0 && c.H != 1)
    throw IllegalParameter("mean curvature sign must be -1, 0 or +1");
}

bool generic(const S3Case& c) { return c.branch == S3Branch::Generic; }

/* partial derivatives of the right-hand sides, for the pointwise Newton
   solves.  dh_* belong to the h-equation, dk_* to the k-equation. */
struct RhsJac {
  double dh_h = 0.0, dh_k = 0.0;
  double dk_h = 0.0, dk_k = 0.0;
};

RhsJac pde_rhs_jacobian(const S3Case& c, double h, double k) {
  const double E = std::exp(-2.0 * k / 3.0);
  const double P = std::exp(4.0 * k / 3.0);
  RhsJac j;
  if (generic(c)) {
    switch (c.H) {
      case -1:
        j.dh_h = 2.0 * E * std::cosh(2.0 * h);
        j.dh_k = -(2.0 / 3.0) * E * std::sinh(2.0 * h);
        j.dk_h = -6.0 * E * std::sinh(2.0 * h);
        j.dk_k = 8.0 * P + 2.0 * E * std::cosh(2.0 * h);
        break;
      case 1:
        j.dh_h = -2.0 * E * std::cos(2.0 * h);
        j.dh_k = (2.0 / 3.0) * E * std::sin(2.0 * h);
        j.dk_h = -6.0 * E * std::sin(2.0 * h);
        j.dk_k = 8.0 * P - 2.0 * E * std::cos(2.0 * h);
        break;
      default:
        j.dh_h = 2.0 * E;
        j.dh_k = -(4.0 / 3.0) * E * h;
        j.dk_h = 0.0;
        j.dk_k = 8.0 * P + 2.0 * E;
    }
  } else {
    j.dk_k = (c.H == -1) ? 8.0 * P + (16.0 / 3.0) * E : 8.0 * P;
  }
  return j;
}

double border_or_zero(const GridField& f, const std::vector<double>& vals, int i, int j) {
  return vals.empty() ? 0.0 : vals[f.index(i, j)];
}

/* five-point laplacian of one unknown at an interior node */
double laplacian(const GridField& f, const std::vector<double>& u, int i, int j) {
  const double s2 = f.spacing * f.spacing;
  return (u[f.index(i + 1, j)] + u[f.index(i - 1, j)] + u[f.index(i, j + 1)] +
          u[f.index(i, j - 1)] - 4.0 * u[f.index(i, j)]) /
         s2;
}

void check_grid(const GridField& f, bool with_h) {
  if (f.nx < 3 || f.ny < 3) throw IllegalParameter("grid must be at least 3x3");
  if (!(f.spacing > 0.0)) throw IllegalParameter("grid spacing must be positive");
  const size_t n = static_cast<size_t>(f.nx) * f.ny;
  if (f.k_values.size() != n) throw IllegalParameter("k grid has the wrong size");
  if (with_h && f.h_values.size() != n) throw IllegalParameter("h grid has the wrong size");
  for (double v : f.k_values)
    if (!std::isfinite(v)) throw IllegalParameter("grid contains a non-finite k value");
  if (with_h)
    for (double v : f.h_values)
      if (!std::isfinite(v)) throw IllegalParameter("grid contains a non-finite h value");
}

/* plain Gauss-Seidel relaxation of the laplace equation on the interior,
   keeping the border fixed: the harmonic extension used as initial guess */
void harmonic_fill(GridField& f, std::vector<double>& u) {
  double scale = 0.0;
  for (int i = 0; i < f.nx; ++i)
    scale = std::max({scale, std::fabs(u[f.index(i, 0)]), std::fabs(u[f.index(i, f.ny - 1)])});
  for (int j = 0; j < f.ny; ++j)
    scale = std::max({scale, std::fabs(u[f.index(0, j)]), std::fabs(u[f.index(f.nx - 1, j)])});
  const double stop = 1e-10 * (1.0 + scale);
  const int cap = 40000;
  for (int sweep = 0; sweep < cap; ++sweep) {
    double moved = 0.0;
    for (int j = 1; j < f.ny - 1; ++j)
      for (int i = 1; i < f.nx - 1; ++i) {
        const double avg = 0.25 * (u[f.index(i + 1, j)] + u[f.index(i - 1, j)] +
                                   u[f.index(i, j + 1)] + u[f.index(i, j - 1)]);
        moved = std::max(moved, std::fabs(avg - u[f.index(i, j)]));
        u[f.index(i, j)] = avg;
      }
    if (moved < stop) break;
  }
}

GridField relax(const S3Case& c, GridField f, int max_iter, double tol) {
  validate_case(c);
  check_grid(f, generic(c));
  if (!(tol > 0.0)) throw IllegalParameter("solver tolerance must be positive");
  if (max_iter < 1) throw IllegalParameter("sweep budget must be positive");

  const bool with_h = generic(c);
  const double s2 = f.spacing * f.spacing;
  const double diag = -4.0 / s2;
  const double step_cap = 1.0;  // trust region keeping the exponentials sane

  double lam = 1.0;
  double res = pde_residual(c, f);
  std::vector<double> save_h, save_k;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    if (res < tol) return f;
    save_k = f.k_values;
    if (with_h) save_h = f.h_values;
    for (int j = 1; j < f.ny - 1; ++j)
      for (int i = 1; i < f.nx - 1; ++i) {
        const int id = f.index(i, j);
        const double h = with_h ? f.h_values[id] : 0.0;
        const double k = f.k_values[id];
        const PdeRhs rhs = pde_rhs(c, h, k);
        const RhsJac jac = pde_rhs_jacobian(c, h, k);
        const double rk = laplacian(f, f.k_values, i, j) - rhs.rhs_k;
        if (with_h) {
          const double rh = laplacian(f, f.h_values, i, j) - rhs.rhs_h;
          /* newton step for the frozen-neighbour 2x2 system */
          const double a = diag - jac.dh_h, b = -jac.dh_k;
          const double cc = -jac.dk_h, d = diag - jac.dk_k;
          const double det = a * d - b * cc;
          if (det == 0.0) continue;
          double dh = (-rh * d + rk * b) / det;
          double dk = (-a * rk + cc * rh) / det;
          dh = std::clamp(dh, -step_cap, step_cap);
          dk = std::clamp(dk, -step_cap, step_cap);
          f.h_values[id] = h + lam * dh;
          f.k_values[id] = k + lam * dk;
        } else {
          const double d = diag - jac.dk_k;
          if (d == 0.0) continue;
          const double dk = std::clamp(-rk / d, -step_cap, step_cap);
          f.k_values[id] = k + lam * dk;
        }
      }
    const double next = pde_residual(c, f);
    if (std::isfinite(next) && next <= res) {
      res = next;
      lam = std::min(1.0, lam * 1.5);
    } else {
      f.k_values = save_k;
      if (with_h) f.h_values = save_h;
      lam *= 0.5;
      if (lam < 1e-8)
        throw DidNotConverge("relaxation stalled: damping exhausted", sweep, res);
    }
  }
  if (res < tol) return f;
  throw DidNotConverge("sweep budget exhausted before reaching tolerance", max_iter, res);
}

}  // namespace

std::string s3_case_name(const S3Case& c) {
  validate_case(c);
  std::string tag = (c.H == -1) ? "h-1" : (c.H == 1) ? "h+1" : "h0";
  tag += generic(c) ? ".gen" : ".ex";
  return tag;
}

S3Case s3_case_from_name(const std::string& name) {
  const auto dot = name.find('.');
  if (dot == std::string::npos) throw IllegalParameter("case tag must look like h-1.gen");
  const std::string hs = name.substr(0, dot), bs = name.substr(dot + 1);
  S3Case c;
  if (hs == "h-1") c.H = -1;
  else if (hs == "h+1") c.H = 1;
  else if (hs == "h0") c.H = 0;
  else throw IllegalParameter("unknown mean-curvature tag '" + hs + "'");
  if (bs == "gen") c.branch = S3Branch::Generic;
  else if (bs == "ex") c.branch = S3Branch::Exceptional;
  else throw IllegalParameter("unknown branch tag '" + bs + "'");
  return c;
}

PdeRhs pde_rhs(const S3Case& c, double h, double k) {
  validate_case(c);
  const double E = std::exp(-2.0 * k / 3.0);
  PdeRhs r;
  if (generic(c)) {
    switch (c.H) {
      case -1:
        r.rhs_h = E * std::sinh(2.0 * h);
        r.rhs_k = 3.0 * E * (2.0 * std::exp(2.0 * k) - std::cosh(2.0 * h));
        break;
      case 1:
        r.rhs_h = -E * std::sin(2.0 * h);
        r.rhs_k = 3.0 * E * (2.0 * std::exp(2.0 * k) + std::cos(2.0 * h));
        break;
      default:
        r.rhs_h = 2.0 * E * h;
        r.rhs_k = 3.0 * E * (2.0 * std::exp(2.0 * k) - 1.0);
    }
  } else {
    r.rhs_k = (c.H == -1) ? 2.0 * E * (3.0 * std::exp(2.0 * k) - 4.0)
                          : 6.0 * std::exp(4.0 * k / 3.0);
  }
  return r;
}

double pde_residual(const S3Case& c, const GridField& f) {
  validate_case(c);
  check_grid(f, generic(c));
  double worst = 0.0;
  for (int j = 1; j < f.ny - 1; ++j)
    for (int i = 1; i < f.nx - 1; ++i) {
      const int id = f.index(i, j);
      const double h = generic(c) ? f.h_values[id] : 0.0;
      const PdeRhs rhs = pde_rhs(c, h, f.k_values[id]);
      worst = std::max(worst, std::fabs(laplacian(f, f.k_values, i, j) - rhs.rhs_k));
      if (generic(c))
        worst = std::max(worst, std::fabs(laplacian(f, f.h_values, i, j) - rhs.rhs_h));
    }
  return worst;
}

GridField s3_solve(const S3Case& c, int nx, int ny, double spacing,
                   const std::function<std::pair<double, double>(double, double)>& boundary,
                   int max_iter, double tol) {
  validate_case(c);
  if (nx < 3 || ny < 3) throw IllegalParameter("grid must be at least 3x3");
  if (!(spacing > 0.0)) throw IllegalParameter("grid spacing must be positive");
  if (!boundary) throw IllegalParameter("boundary data callback required");

  GridField f;
  f.nx = nx;
  f.ny = ny;
  f.spacing = spacing;
  f.k_values.assign(static_cast<size_t>(nx) * ny, 0.0);
  if (generic(c)) f.h_values.assign(static_cast<size_t>(nx) * ny, 0.0);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i != 0 && i != nx - 1 && j != 0 && j != ny - 1) continue;
      const auto [bh, bk] = boundary(f.x_of(i), f.y_of(j));
      if (!std::isfinite(bh) || !std::isfinite(bk))
        throw IllegalParameter("boundary data must be finite");
      f.k_values[f.index(i, j)] = bk;
      if (generic(c)) f.h_values[f.index(i, j)] = bh;
    }
  harmonic_fill(f, f.k_values);
  if (generic(c)) harmonic_fill(f, f.h_values);
  return relax(c, std::move(f), max_iter, tol);
}

GridField s3_solve_from(const S3Case& c, GridField start, int max_iter, double tol) {
  validate_case(c);
  if (!generic(c)) start.h_values.clear();
  return relax(c, std::move(start), max_iter, tol);
}

FrameCoefficients frame_coefficients(const S3Case& c, double t, double h, double k, double l) {
  validate_case(c);
  FrameCoefficients out;
  if (!generic(c)) {
    /* upper sign of the two closed families */
    switch (c.H) {
      case -1: out = {0.0, 1.0, std::exp(k)}; break;
      case 1: out = {1.0, 0.0, std::exp(k - t)}; break;
      default: out = {0.0, 0.0, std::exp(k)};
    }
    return out;
  }
  const double u = t + l;
  double den = 0.0;
  switch (c.H) {
    case -1: {
      const double cu = std::cos(u);
      den = cu * cu + std::sinh(h) * std::sinh(h);
      out.a22 = -std::sin(u) * cu / den;
      out.a23 = -std::sinh(h) * std::cosh(h) / den;
      break;
    }
    case 1: {
      const double ch = std::cos(h);
      den = ch * ch + std::sinh(u) * std::sinh(u);
      out.a22 = std::sinh(u) * std::cosh(u) / den;
      out.a23 = -std::sin(h) * ch / den;
      break;
    }
    default:
      den = u * u + h * h;
      out.a22 = u / den;
      out.a23 = -h / den;
  }
  if (!(den > 1e-14)) throw SingularPoint("coefficient denominator vanishes at this point");
  out.a6 = std::exp(k) / std::sqrt(den);
  return out;
}

double ode_consistency_residual(const S3Case& c, const std::vector<double>& t_samples,
                                double h, double k, double l) {
  validate_case(c);
  if (t_samples.empty()) throw IllegalParameter("need at least one sample");
  const double d = 1e-5;
  double worst = 0.0;
  for (double t : t_samples) {
    const FrameCoefficients c0 = frame_coefficients(c, t, h, k, l);
    const FrameCoefficients cp = frame_coefficients(c, t + d, h, k, l);
    const FrameCoefficients cm = frame_coefficients(c, t - d, h, k, l);
    const double d22 = (cp.a22 - cm.a22) / (2.0 * d);
    const double d23 = (cp.a23 - cm.a23) / (2.0 * d);
    const double dln6 = (std::log(cp.a6) - std::log(cm.a6)) / (2.0 * d);
    worst = std::max(worst, std::fabs(d22 - (-c0.a22 * c0.a22 + c0.a23 * c0.a23 + c.H)));
    worst = std::max(worst, std::fabs(d23 - (-2.0 * c0.a22 * c0.a23)));
    worst = std::max(worst, std::fabs(dln6 - (-c0.a22)));
  }
  return worst;
}

void write_field_csv(const GridField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IllegalParameter("cannot open '" + path + "' for writing");
  out << "x,y,h,k\n";
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const double h = border_or_zero(f, f.h_values, i, j);
      out << format_double(f.x_of(i)) << ',' << format_double(f.y_of(j)) << ','
          << format_double(h) << ',' << format_double(f.k_values[f.index(i, j)]) << '\n';
    }
}

void write_field_header_json(const S3Case& c, const GridField& f, double residual,
                             const std::string& path) {
  JsonWriter w;
  w.begin_object();
  w.key("case");
  w.value(s3_case_name(c));
  w.key("nx");
  w.value(f.nx);
  w.key("ny");
  w.value(f.ny);
  w.key("spacing");
  w.value(f.spacing);
  w.key("residual");
  w.value(residual);
  w.end_object();
  std::ofstream out(path);
  if (!out) throw IllegalParameter("cannot open '" + path + "' for writing");
  out << w.str() << '\n';
}

GridField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IllegalParameter("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y", 0) != 0)
    throw IllegalParameter("'" + path + "' is not a field csv (missing x,y,h,k header)");

  std::vector<double> xs, ys, hs, ks;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double vals[4];
    const char* p = line.c_str();
    const char* end = p + line.size();
    for (int c = 0; c < 4; ++c) {
      const auto res = std::from_chars(p, end, vals[c]);
      if (res.ec != std::errc{}) throw IllegalParameter("malformed field row '" + line + "'");
      p = res.ptr;
      if (c < 3) {
        if (p == end || *p != ',') throw IllegalParameter("malformed field row '" + line + "'");
        ++p;
      }
    }
    xs.push_back(vals[0]);
    ys.push_back(vals[1]);
    hs.push_back(vals[2]);
    ks.push_back(vals[3]);
  }
  if (xs.size() < 9) throw IllegalParameter("field csv has fewer than 9 nodes");

  /* rows are written x-fastest: nx = run length until y changes */
  size_t nx = 1;
  while (nx < xs.size() && ys[nx] == ys[0]) ++nx;
  if (nx < 3 || xs.size() % nx != 0)
    throw IllegalParameter("field csv rows do not form a rectangular grid");
  GridField f;
  f.nx = static_cast<int>(nx);
  f.ny = static_cast<int>(xs.size() / nx);
  f.spacing = xs[1] - xs[0];
  if (!(f.spacing > 0.0)) throw IllegalParameter("field csv has non-increasing x spacing");
  f.h_values = std::move(hs);
  f.k_values = std::move(ks);
  check_grid(f, true);
  return f;
}

}  // namespace affsym
