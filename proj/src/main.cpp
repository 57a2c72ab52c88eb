#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "affsym/blaschke.hpp"
#include "affsym/constructions.hpp"
#include "affsym/cubic.hpp"
#include "affsym/errors.hpp"
#include "affsym/isometry.hpp"
#include "affsym/json_out.hpp"
#include "affsym/linalg.hpp"
#include "affsym/minkowski.hpp"
#include "affsym/s3_pde.hpp"
#include "affsym/stabilizer.hpp"

/* command line front end.  every subcommand prints one json report to stdout
   (or --out) with fixed key order and 17 significant digit floats, so equal
   inputs give byte-identical output.  exit code 0 = clean result, 1 = the
   library rejected the input or the answer stayed ambiguous, 2 = bad usage. */

namespace {

using namespace affsym;

struct GlobalOpts {
  double tol = -1.0;  // negative = keep the subcommand's own default
  unsigned long long seed = 1234;
  std::string out;
  int threads = 1;
};

double pick_tol(const GlobalOpts& g, double fallback) { return g.tol > 0.0 ? g.tol : fallback; }

void emit(const GlobalOpts& g, const std::string& body) {
  if (g.out.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    std::fputc('\n', stdout);
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw IllegalParameter("cannot open output file " + g.out);
  f << body << '\n';
}

const char* error_kind(const ToolError& e) {
  if (dynamic_cast<const NotAnIsometry*>(&e)) return "NotAnIsometry";
  if (dynamic_cast<const NumericallyAmbiguous*>(&e)) return "NumericallyAmbiguous";
  if (dynamic_cast<const IllegalParameter*>(&e)) return "IllegalParameter";
  if (dynamic_cast<const WrongFrameKind*>(&e)) return "WrongFrameKind";
  if (dynamic_cast<const NotAdmissible*>(&e)) return "NotAdmissible";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "DegenerateInput";
  if (dynamic_cast<const OutOfDomain*>(&e)) return "OutOfDomain";
  if (dynamic_cast<const DegenerateHypersurface*>(&e)) return "DegenerateHypersurface";
  if (dynamic_cast<const DefiniteMetric*>(&e)) return "DefiniteMetric";
  if (dynamic_cast<const NotAHypersphere*>(&e)) return "NotAHypersphere";
  if (dynamic_cast<const IllegalCurve*>(&e)) return "IllegalCurve";
  if (dynamic_cast<const SingularPoint*>(&e)) return "SingularPoint";
  if (dynamic_cast<const DidNotConverge*>(&e)) return "DidNotConverge";
  return "ToolError";
}

std::string error_report(const ToolError& e) {
  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value("error");
  w.key("error");
  w.value(error_kind(e));
  w.key("message");
  w.value(e.what());
  if (auto* d = dynamic_cast<const DidNotConverge*>(&e)) {
    w.key("iterations");
    w.value(d->iterations);
    w.key("residual");
    w.value(d->residual);
  }
  w.end_object();
  return w.str();
}

/* ---- json input helpers (reports are written by hand, inputs use the
   vendored parser) ---- */

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IllegalParameter("cannot open input file " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw DegenerateInput("malformed json in " + path + ": " + e.what());
  }
  return j;
}

double want_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw DegenerateInput(where + " must be a number");
  return j.get<double>();
}

FrameKind parse_kind(const std::string& s) {
  if (s == "ONB") return FrameKind::ONB;
  if (s == "LVB") return FrameKind::LVB;
  throw DegenerateInput("frame kind must be ONB or LVB, got " + s);
}

Mat3 parse_matrix(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw DegenerateInput("matrix must be a 3x3 array");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != 3) throw DegenerateInput("matrix must be a 3x3 array");
    for (int k = 0; k < 3; ++k) m(i, k) = want_number(row[k], "matrix entry");
  }
  return m;
}

std::vector<double> parse_number_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw DegenerateInput(where + " must be an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(want_number(x, where + " entry"));
  return v;
}

/* ---- report building blocks ---- */

void write_vec3(JsonWriter& w, const Vec3& v) {
  w.begin_array();
  for (int i = 0; i < 3; ++i) w.value(v[i]);
  w.end_array();
}

void write_frame(JsonWriter& w, const Frame& f) {
  w.begin_object();
  w.key("kind");
  w.value(f.kind == FrameKind::ONB ? "ONB" : "LVB");
  w.key("basis");
  w.begin_array();
  for (int i = 0; i < 3; ++i) write_vec3(w, f.basis[i]);
  w.end_array();
  w.end_object();
}

void write_params(JsonWriter& w, const std::map<std::string, double>& params) {
  w.begin_object();
  for (const auto& [k, v] : params) {
    w.key(k);
    w.value(v);
  }
  w.end_object();
}

/* ---- family construction shared by scan / generate / verify ---- */

struct CurveSpec {
  bool poly = false;
  std::vector<double> c1, c2;
  double t0 = 1.0, t1 = 2.0;
};

/* accepts "ode" or "poly:a0,a1,..;b0,b1,..[@t0:t1]" */
CurveSpec parse_curve_arg(const std::string& s) {
  CurveSpec cs;
  if (s.empty() || s == "ode") return cs;
  if (s.rfind("poly:", 0) != 0)
    throw IllegalParameter("curve must be 'ode' or 'poly:a0,a1,..;b0,b1,..', got " + s);
  cs.poly = true;
  std::string body = s.substr(5);
  if (auto at = body.find('@'); at != std::string::npos) {
    const std::string range = body.substr(at + 1);
    body = body.substr(0, at);
    const auto colon = range.find(':');
    if (colon == std::string::npos) throw IllegalParameter("curve range must be t0:t1");
    cs.t0 = std::stod(range.substr(0, colon));
    cs.t1 = std::stod(range.substr(colon + 1));
  }
  const auto semi = body.find(';');
  if (semi == std::string::npos)
    throw IllegalParameter("polynomial curve needs two coefficient lists split by ';'");
  auto parse_list = [](const std::string& part) {
    std::vector<double> out;
    std::stringstream ss(part);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      out.push_back(std::stod(tok));
    }
    return out;
  };
  cs.c1 = parse_list(body.substr(0, semi));
  cs.c2 = parse_list(body.substr(semi + 1));
  if (cs.c1.empty() || cs.c2.empty())
    throw IllegalParameter("polynomial curve needs nonempty coefficient lists");
  return cs;
}

struct FamilySpec {
  std::string family;
  std::string base;  // empty = family default
  double c = 1.0;
  CurveSpec curve;
};

BaseTag parse_base(const std::string& s) {
  if (s == "ellipsoid") return BaseTag::Ellipsoid;
  if (s == "two-sheet-hyperboloid") return BaseTag::TwoSheetHyperboloid;
  if (s == "one-sheet-hyperboloid") return BaseTag::OneSheetHyperboloid;
  if (s == "elliptic-paraboloid") return BaseTag::EllipticParaboloidGraph;
  if (s == "hyperbolic-paraboloid") return BaseTag::HyperbolicParaboloidGraph;
  if (s == "tzitzeica") return BaseTag::Tzitzeica;
  throw IllegalParameter("unknown base surface " + s);
}

struct BuiltFamily {
  ImmersionSampler sampler;
  FamilySpec spec;       // normalized: base filled in, curve resolved
  bool has_curve = false;
  PlaneCurve curve;
  CaseTag tag{};
  int epsilon1 = 0;
};

BuiltFamily build_family(FamilySpec fs) {
  BuiltFamily out;
  const std::string& fam = fs.family;

  if (fam == "z2z2" || fam == "z2") {
    if (!fs.base.empty()) throw IllegalParameter("family " + fam + " takes no base surface");
    if (fs.curve.poly) throw IllegalParameter("family " + fam + " takes no profile curve");
    out.sampler = (fam == "z2z2") ? quadric_z2z2() : quadric_z2();
    out.spec = fs;
    return out;
  }

  if (fam == "warped-proper" || fam == "warped-graph") {
    if (fs.base.empty()) fs.base = (fam == "warped-proper") ? "ellipsoid" : "elliptic-paraboloid";
    const BaseSurface base = base_catalog(parse_base(fs.base));
    CaseTag tag;
    if (fam == "warped-proper") {
      if (base.is_graph())
        throw IllegalParameter("warped-proper needs a centered base, got " + fs.base);
      tag.kind = CaseKind::ProperWarped;
      tag.flavor = (base.tag == BaseTag::Tzitzeica) ? CaseFlavor::Z3 : CaseFlavor::SO2;
    } else {
      if (!base.is_graph())
        throw IllegalParameter("warped-graph needs a graph base, got " + fs.base);
      tag.kind = CaseKind::ProperGraph;
      tag.flavor = (base.tag == BaseTag::HyperbolicParaboloidGraph) ? CaseFlavor::SO11
                                                                    : CaseFlavor::SO2;
    }
    PlaneCurve curve = fs.curve.poly
                           ? poly_curve(fs.curve.c1, fs.curve.c2, fs.curve.t0, fs.curve.t1)
                           : default_proper_curve(tag, base.epsilon1);
    out.sampler = (fam == "warped-proper") ? warped_proper(curve, base)
                                           : warped_graph_proper(curve, base);
    out.spec = fs;
    out.has_curve = true;
    out.curve = curve;
    out.tag = tag;
    out.epsilon1 = base.epsilon1;
    return out;
  }

  if (fam == "improper-a" || fam == "improper-b") {
    if (fs.curve.poly)
      throw IllegalParameter("improper families use fixed profiles, drop --curve");
    if (fs.base.empty()) fs.base = "elliptic-paraboloid";
    const BaseSurface base = base_catalog(parse_base(fs.base));
    if (!base.is_graph())
      throw IllegalParameter("improper families need a graph base, got " + fs.base);
    const CaseKind kind = (fam == "improper-a") ? CaseKind::ImproperA : CaseKind::ImproperB;
    out.sampler = improper_family(kind, fs.c, base);
    out.spec = fs;
    return out;
  }

  throw IllegalParameter("unknown family " + fam +
                         " (expected z2z2, z2, warped-proper, warped-graph, improper-a, "
                         "improper-b)");
}

FamilySpec family_spec_from_json(const nlohmann::json& j) {
  FamilySpec fs;
  if (!j.contains("family")) throw DegenerateInput("sampler file lacks a family key");
  fs.family = j.at("family").get<std::string>();
  if (j.contains("base") && !j.at("base").is_null()) fs.base = j.at("base").get<std::string>();
  if (j.contains("c")) fs.c = want_number(j.at("c"), "c");
  if (j.contains("curve") && !j.at("curve").is_null()) {
    const auto& cj = j.at("curve");
    const std::string type = cj.value("type", "ode");
    if (type == "poly") {
      fs.curve.poly = true;
      fs.curve.c1 = parse_number_list(cj.at("coeff1"), "coeff1");
      fs.curve.c2 = parse_number_list(cj.at("coeff2"), "coeff2");
      fs.curve.t0 = cj.value("t0", 1.0);
      fs.curve.t1 = cj.value("t1", 2.0);
    } else if (type != "ode") {
      throw DegenerateInput("curve type must be ode or poly, got " + type);
    }
  }
  return fs;
}

/* grid argument "t0:t1:nt,v0:v1:nv,w0:w1:nw"; single-count axes take the
   midpoint, matching the behaviour of the automatic grids */
std::vector<Vec3> parse_grid_arg(const std::string& s) {
  std::array<double, 3> lo{}, hi{};
  std::array<int, 3> n{};
  std::stringstream ss(s);
  std::string part;
  int axis = 0;
  while (std::getline(ss, part, ',')) {
    if (axis >= 3) throw IllegalParameter("grid spec has more than three axes");
    const auto c1 = part.find(':');
    const auto c2 = (c1 == std::string::npos) ? std::string::npos : part.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw IllegalParameter("grid axis must look like t0:t1:nt, got " + part);
    lo[axis] = std::stod(part.substr(0, c1));
    hi[axis] = std::stod(part.substr(c1 + 1, c2 - c1 - 1));
    n[axis] = std::stoi(part.substr(c2 + 1));
    if (n[axis] < 1) throw IllegalParameter("grid axis count must be positive");
    ++axis;
  }
  if (axis != 3) throw IllegalParameter("grid spec needs three axes t,v,w");
  auto line = [](double a, double b, int m, int i) {
    return (m == 1) ? 0.5 * (a + b) : a + (b - a) * i / (m - 1);
  };
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(n[0]) * n[1] * n[2]);
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k)
        pts.push_back(Vec3{line(lo[0], hi[0], n[0], i), line(lo[1], hi[1], n[1], j),
                           line(lo[2], hi[2], n[2], k)});
  return pts;
}

void write_scan_points(JsonWriter& w, const ScanReport& rep) {
  w.key("points");
  w.begin_array();
  for (const auto& p : rep.points) {
    w.begin_object();
    w.key("point");
    write_vec3(w, p.point);
    w.key("status");
    w.value(p.status);
    w.key("class");
    w.value(tag_name(p.cls.tag));
    w.key("params");
    write_params(w, p.cls.params);
    w.key("J");
    w.value(p.J);
    w.key("kappa_hat");
    w.value(p.kappa_hat);
    w.key("H");
    w.value(p.H_point);
    w.key("residuals");
    w.begin_object();
    w.key("egregium");
    w.value(p.egregium);
    w.key("fit");
    w.value(p.cls.fit_residual);
    w.key("generator");
    w.value(p.cls.generator_residual);
    w.key("margin");
    w.value(p.cls.margin);
    w.end_object();
    w.end_object();
  }
  w.end_array();
}

void write_scan_csv(const std::string& path, const ScanReport& rep) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IllegalParameter("cannot open csv file " + path);
  f << "t,v,w,status,class,J,kappa_hat,H,egregium\n";
  for (const auto& p : rep.points) {
    f << format_double(p.point[0]) << ',' << format_double(p.point[1]) << ','
      << format_double(p.point[2]) << ',' << p.status << ',' << tag_name(p.cls.tag) << ','
      << format_double(p.J) << ',' << format_double(p.kappa_hat) << ','
      << format_double(p.H_point) << ',' << format_double(p.egregium) << '\n';
  }
}

/* ---- subcommands ---- */

struct ClassifyIsoOpts {
  std::string in;
};

int run_classify_isometry(const GlobalOpts& g, const ClassifyIsoOpts& o) {
  const nlohmann::json j = load_json(o.in);
  Isometry m;
  m.kind = parse_kind(j.value("kind", "ONB"));
  if (!j.contains("matrix")) throw DegenerateInput("input lacks a matrix key");
  m.matrix = parse_matrix(j.at("matrix"));

  const IsometryClass cls = classify_isometry(m, pick_tol(g, 1e-9));

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value("ok");
  w.key("family");
  w.value(family_name(cls.family));
  if (cls.parameter) {
    w.key("parameter");
    w.value(*cls.parameter);
  }
  w.key("frame");
  write_frame(w, cls.adapted_frame);
  w.key("residuals");
  w.begin_object();
  w.key("normal_form");
  w.value(cls.residual);
  w.key("isometry");
  w.value(isometry_residual(m));
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return 0;
}

struct ClassifyCubicOpts {
  std::string in;
};

int run_classify_cubic(const GlobalOpts& g, const ClassifyCubicOpts& o) {
  const nlohmann::json j = load_json(o.in);
  const FrameKind kind = parse_kind(j.value("frame", "ONB"));

  CubicForm c;
  if (j.contains("coeffs")) {
    const auto v = parse_number_list(j.at("coeffs"), "coeffs");
    if (v.size() != 7) throw DegenerateInput("coeffs must hold exactly 7 numbers");
    std::array<double, 7> a{};
    std::copy(v.begin(), v.end(), a.begin());
    c = (kind == FrameKind::ONB) ? CubicForm::from_onb_coeffs(a)
                                 : CubicForm::from_lvb_coeffs(a);
  } else if (j.contains("dense")) {
    const auto v = parse_number_list(j.at("dense"), "dense");
    if (v.size() != 10) throw DegenerateInput("dense must hold exactly 10 numbers");
    std::copy(v.begin(), v.end(), c.dense.begin());
    c.frame = (kind == FrameKind::ONB) ? Frame::reference_onb() : Frame::reference_lvb();
    const double scale = std::max(1.0, c.norm());
    if (c.apolarity_residual() > 1e-6 * scale)
      throw NotAdmissible("dense coefficients violate the trace conditions");
  } else {
    throw DegenerateInput("input needs either coeffs (7 entries) or dense (10 entries)");
  }

  const SymmetryClass cls = stabilizer_classify(c, pick_tol(g, 1e-8));
  const bool ambiguous = cls.tag == SymmetryTag::NumericallyAmbiguous;

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value(ambiguous ? "ambiguous" : "ok");
  w.key("class");
  w.value(tag_name(cls.tag));
  w.key("params");
  write_params(w, cls.params);
  w.key("frame");
  write_frame(w, cls.frame);
  w.key("residuals");
  w.begin_object();
  w.key("fit");
  w.value(cls.fit_residual);
  w.key("generator");
  w.value(cls.generator_residual);
  w.key("margin");
  w.value(cls.margin);
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return ambiguous ? 1 : 0;
}

struct ScanOpts {
  std::string family, base, curve = "ode", in, grid, csv;
  double c = 1.0;
  double step = 1e-3;
  double tol_class = -1.0;
};

BuiltFamily resolve_input_family(const ScanOpts& o) {
  if (!o.in.empty()) return build_family(family_spec_from_json(load_json(o.in)));
  if (o.family.empty()) throw IllegalParameter("need either --family or --in sampler.json");
  FamilySpec fs;
  fs.family = o.family;
  fs.base = o.base;
  fs.c = o.c;
  fs.curve = parse_curve_arg(o.curve);
  return build_family(fs);
}

int run_scan(const GlobalOpts& g, const ScanOpts& o) {
  const BuiltFamily fam = resolve_input_family(o);
  const std::vector<Vec3> pts = o.grid.empty()
                                    ? grid_points(fam.sampler.domain, 3, 3, 3)
                                    : parse_grid_arg(o.grid);
  const double tol = (o.tol_class > 0.0) ? o.tol_class : pick_tol(g, 1e-5);
  const ScanReport rep = symmetry_scan(fam.sampler, pts, o.step, tol, g.threads);

  size_t ambiguous = 0;
  for (const auto& p : rep.points)
    if (p.status != "ok") ++ambiguous;

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value(ambiguous == 0 ? "ok" : "ambiguous");
  w.key("family");
  w.value(fam.sampler.name);
  w.key("H_est");
  w.value(rep.H_est);
  write_scan_points(w, rep);
  w.key("residuals");
  w.begin_object();
  w.key("hypersphere");
  w.value(rep.hypersphere_residual);
  w.end_object();
  w.end_object();
  emit(g, w.str());
  if (!o.csv.empty()) write_scan_csv(o.csv, rep);
  return ambiguous == 0 ? 0 : 1;
}

struct GenerateOpts {
  std::string family, base, curve = "ode";
  double c = 1.0;
};

int run_generate(const GlobalOpts& g, const GenerateOpts& o) {
  FamilySpec fs;
  fs.family = o.family;
  fs.base = o.base;
  fs.c = o.c;
  fs.curve = parse_curve_arg(o.curve);
  const BuiltFamily fam = build_family(fs);

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value("ok");
  w.key("family");
  w.value(fam.spec.family);
  if (!fam.spec.base.empty()) {
    w.key("base");
    w.value(fam.spec.base);
  }
  if (fam.spec.family == "improper-a" || fam.spec.family == "improper-b") {
    w.key("c");
    w.value(fam.spec.c);
  }
  if (fam.has_curve) {
    w.key("curve");
    w.begin_object();
    w.key("type");
    w.value(fam.spec.curve.poly ? "poly" : "ode");
    if (fam.spec.curve.poly) {
      w.key("coeff1");
      w.begin_array();
      for (double x : fam.spec.curve.c1) w.value(x);
      w.end_array();
      w.key("coeff2");
      w.begin_array();
      for (double x : fam.spec.curve.c2) w.value(x);
      w.end_array();
      w.key("t0");
      w.value(fam.spec.curve.t0);
      w.key("t1");
      w.value(fam.spec.curve.t1);
    }
    w.end_object();
  }
  w.key("name");
  w.value(fam.sampler.name);
  w.key("expected_class");
  w.value(fam.sampler.expected_class);
  w.key("expected_mean_curvature");
  if (fam.sampler.expected_mean_curvature)
    w.value(*fam.sampler.expected_mean_curvature);
  else
    w.raw("null");
  w.key("domain");
  w.begin_object();
  w.key("lo");
  write_vec3(w, fam.sampler.domain.lo);
  w.key("hi");
  write_vec3(w, fam.sampler.domain.hi);
  w.end_object();
  w.key("residuals");
  w.begin_object();
  if (fam.has_curve) {
    std::vector<double> samples;
    const int n = 33;
    for (int i = 0; i < n; ++i)
      samples.push_back(fam.curve.t0 + (fam.curve.t1 - fam.curve.t0) * i / (n - 1));
    const CurveCondition cc = curve_condition_residual(fam.curve, fam.tag, fam.epsilon1, samples);
    w.key("curve_condition");
    w.value(cc.max_residual);
    w.key("curve_min_lhs");
    w.value(cc.min_lhs);
  }
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return 0;
}

struct VerifyOpts {
  std::string family, base, curve = "ode", in;
  double c = 1.0;
  double step = 1e-3;
  int random_points = 13;
};

int run_verify(const GlobalOpts& g, const VerifyOpts& o) {
  ScanOpts so;
  so.family = o.family;
  so.base = o.base;
  so.curve = o.curve;
  so.in = o.in;
  so.c = o.c;
  const BuiltFamily fam = resolve_input_family(so);

  /* regular grid plus seeded random interior points, all far enough from the
     faces for the widest difference stencil */
  const double inset = std::max(0.05, blaschke_margin(o.step) + 0.01);
  std::vector<Vec3> pts = grid_points(fam.sampler.domain, 3, 3, 3);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < o.random_points; ++i) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      const double a = fam.sampler.domain.lo[k] + inset;
      const double b = fam.sampler.domain.hi[k] - inset;
      p[k] = a + (b - a) * u(rng);
    }
    pts.push_back(p);
  }

  const double tol = pick_tol(g, 1e-5);
  const ScanReport rep = symmetry_scan(fam.sampler, pts, o.step, tol, g.threads);

  size_t expected_hits = 0, accepted = 0;
  double worst_egregium = 0.0;
  for (const auto& p : rep.points) {
    if (p.status != "ok") continue;
    ++accepted;
    worst_egregium = std::max(worst_egregium, p.egregium);
    if (!fam.sampler.expected_class.empty() &&
        fam.sampler.expected_class == tag_name(p.cls.tag))
      ++expected_hits;
  }

  struct Check {
    const char* name;
    double value, limit;
    bool at_most;  // false = value must stay at or above the limit
    bool pass;
  };
  std::vector<Check> checks;
  auto add = [&checks](const char* name, double value, double limit, bool at_most) {
    checks.push_back({name, value, limit, at_most, at_most ? value <= limit : value >= limit});
  };

  add("hypersphere_residual", rep.hypersphere_residual, 1e-4, true);
  if (fam.sampler.expected_mean_curvature)
    add("mean_curvature_gap", std::fabs(rep.H_est - *fam.sampler.expected_mean_curvature), 1e-3,
        true);
  if (!fam.sampler.expected_class.empty())
    add("class_fraction", rep.points.empty() ? 0.0 : double(expected_hits) / rep.points.size(),
        0.95, false);
  add("egregium_max", worst_egregium, 1e-4, true);
  add("accepted_fraction", rep.points.empty() ? 0.0 : double(accepted) / rep.points.size(), 0.95,
      false);
  if (fam.has_curve) {
    std::vector<double> samples;
    const int n = 33;
    for (int i = 0; i < n; ++i)
      samples.push_back(fam.curve.t0 + (fam.curve.t1 - fam.curve.t0) * i / (n - 1));
    const CurveCondition cc = curve_condition_residual(fam.curve, fam.tag, fam.epsilon1, samples);
    add("curve_condition", cc.max_residual, 1e-8, true);
    add("curve_min_lhs", cc.min_lhs, 1e-6, false);
  }

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value(all_pass ? "ok" : "fail");
  w.key("family");
  w.value(fam.sampler.name);
  w.key("H_est");
  w.value(rep.H_est);
  w.key("checks");
  w.begin_array();
  for (const auto& c : checks) {
    w.begin_object();
    w.key("name");
    w.value(c.name);
    w.key("value");
    w.value(c.value);
    w.key("limit");
    w.value(c.limit);
    w.key("bound");
    w.value(c.at_most ? "max" : "min");
    w.key("pass");
    w.value(c.pass);
    w.end_object();
  }
  w.end_array();
  w.key("residuals");
  w.begin_object();
  w.key("hypersphere");
  w.value(rep.hypersphere_residual);
  w.key("egregium_max");
  w.value(worst_egregium);
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return all_pass ? 0 : 1;
}

struct S3SolveOpts {
  std::string case_tag;
  int grid = 65;
  double spacing = -1.0;  // negative = span the unit square
  std::string bc;
  int max_iter = 10000;
  std::string field = "field";
};

int run_s3_solve(const GlobalOpts& g, const S3SolveOpts& o) {
  const S3Case c = s3_case_from_name(o.case_tag);
  const double tol = pick_tol(g, 1e-6);

  GridField f;
  if (!o.bc.empty()) {
    GridField start = read_field_csv(o.bc);
    f = s3_solve_from(c, std::move(start), o.max_iter, tol);
  } else {
    if (o.grid < 3) throw IllegalParameter("grid must have at least 3 nodes per side");
    const double spacing = (o.spacing > 0.0) ? o.spacing : 1.0 / (o.grid - 1);
    auto zero = [](double, double) { return std::pair<double, double>{0.0, 0.0}; };
    f = s3_solve(c, o.grid, o.grid, spacing, zero, o.max_iter, tol);
  }

  const double res = pde_residual(c, f);
  write_field_csv(f, o.field + ".csv");
  write_field_header_json(c, f, res, o.field + ".json");

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value("ok");
  w.key("case");
  w.value(s3_case_name(c));
  w.key("nx");
  w.value(f.nx);
  w.key("ny");
  w.value(f.ny);
  w.key("spacing");
  w.value(f.spacing);
  w.key("files");
  w.begin_array();
  w.value(o.field + ".csv");
  w.value(o.field + ".json");
  w.end_array();
  w.key("residuals");
  w.begin_object();
  w.key("pde");
  w.value(res);
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return 0;
}

struct S3CheckOpts {
  std::string in;
  std::string case_tag;
};

int run_s3_check(const GlobalOpts& g, const S3CheckOpts& o) {
  std::string tag = o.case_tag;
  if (tag.empty()) {
    /* take the case from the sibling json header written next to the csv */
    std::string header = o.in;
    if (header.size() > 4 && header.compare(header.size() - 4, 4, ".csv") == 0)
      header.replace(header.size() - 4, 4, ".json");
    else
      header += ".json";
    const nlohmann::json j = load_json(header);
    if (!j.contains("case")) throw DegenerateInput("field header lacks a case key");
    tag = j.at("case").get<std::string>();
  }
  const S3Case c = s3_case_from_name(tag);
  const GridField f = read_field_csv(o.in);
  const double res = pde_residual(c, f);
  const double tol = pick_tol(g, 1e-6);
  const bool ok = res <= tol;

  JsonWriter w;
  w.begin_object();
  w.key("status");
  w.value(ok ? "ok" : "fail");
  w.key("case");
  w.value(s3_case_name(c));
  w.key("nx");
  w.value(f.nx);
  w.key("ny");
  w.value(f.ny);
  w.key("spacing");
  w.value(f.spacing);
  w.key("residuals");
  w.begin_object();
  w.key("pde");
  w.value(res);
  w.key("tol");
  w.value(tol);
  w.end_object();
  w.end_object();
  emit(g, w.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pointwise symmetry toolkit for indefinite affine hyperspheres"};
  app.require_subcommand(1);
  app.fallthrough(true);

  GlobalOpts g;
  app.add_option("--tol", g.tol, "override the subcommand's default tolerance");
  app.add_option("--seed", g.seed, "seed for randomized sample points");
  app.add_option("--out", g.out, "write the json report here instead of stdout");
  app.add_option("--threads", g.threads, "worker threads for grid scans")
      ->check(CLI::PositiveNumber);

  ClassifyIsoOpts iso;
  auto* sub_iso = app.add_subcommand("classify-isometry",
                                     "conjugacy family of a special isometry");
  sub_iso->add_option("--in", iso.in, "json file with kind + 3x3 matrix")->required();

  ClassifyCubicOpts cub;
  auto* sub_cub = app.add_subcommand("classify-cubic",
                                     "pointwise symmetry class of a cubic form");
  sub_cub->add_option("--in", cub.in, "json file with frame + coeffs or dense entries")
      ->required();

  ScanOpts sc;
  auto* sub_scan = app.add_subcommand("scan", "classify every grid point of a hypersurface");
  auto* scan_fam = sub_scan->add_option("--family", sc.family, "built-in family name");
  auto* scan_in = sub_scan->add_option("--in", sc.in, "sampler description file");
  scan_fam->excludes(scan_in);
  sub_scan->add_option("--base", sc.base, "base surface for the warped families");
  sub_scan->add_option("--curve", sc.curve, "profile curve, ode or poly:a0,..;b0,..");
  sub_scan->add_option("--c", sc.c, "scale of the improper families");
  sub_scan->add_option("--grid", sc.grid, "t0:t1:nt,v0:v1:nv,w0:w1:nw (default 3x3x3 inside)");
  sub_scan->add_option("--step", sc.step, "finite difference step");
  sub_scan->add_option("--tol-class", sc.tol_class, "classifier tolerance for scans");
  sub_scan->add_option("--csv", sc.csv, "also write one csv row per point");

  GenerateOpts gen;
  auto* sub_gen = app.add_subcommand("generate", "write a sampler description file");
  sub_gen->add_option("--family", gen.family, "built-in family name")->required();
  sub_gen->add_option("--base", gen.base, "base surface for the warped families");
  sub_gen->add_option("--curve", gen.curve, "profile curve, ode or poly:a0,..;b0,..");
  sub_gen->add_option("--c", gen.c, "scale of the improper families");

  VerifyOpts ver;
  auto* sub_ver = app.add_subcommand("verify", "check a family against its advertised invariants");
  auto* ver_fam = sub_ver->add_option("--family", ver.family, "built-in family name");
  auto* ver_in = sub_ver->add_option("--in", ver.in, "sampler description file");
  ver_fam->excludes(ver_in);
  sub_ver->add_option("--base", ver.base, "base surface for the warped families");
  sub_ver->add_option("--curve", ver.curve, "profile curve, ode or poly:a0,..;b0,..");
  sub_ver->add_option("--c", ver.c, "scale of the improper families");
  sub_ver->add_option("--step", ver.step, "finite difference step");
  sub_ver->add_option("--points", ver.random_points, "extra random sample points")
      ->check(CLI::NonNegativeNumber);

  S3SolveOpts s3s;
  auto* sub_s3s = app.add_subcommand("s3-solve", "relax one of the reduced elliptic systems");
  sub_s3s->add_option("--case", s3s.case_tag, "h-1.gen, h-1.ex, h0.gen, h0.ex, h+1.gen, h+1.ex")
      ->required();
  sub_s3s->add_option("--grid", s3s.grid, "nodes per side of the square grid");
  sub_s3s->add_option("--spacing", s3s.spacing, "grid spacing (default spans the unit square)");
  sub_s3s->add_option("--bc", s3s.bc, "field csv supplying the boundary and initial guess");
  sub_s3s->add_option("--max-iter", s3s.max_iter, "relaxation sweep budget");
  sub_s3s->add_option("--field", s3s.field, "basename for the csv + json header output");

  S3CheckOpts s3c;
  auto* sub_s3c = app.add_subcommand("s3-check", "recompute the residual of a stored field");
  sub_s3c->add_option("--in", s3c.in, "field csv file")->required();
  sub_s3c->add_option("--case", s3c.case_tag, "override the case tag from the header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_iso->parsed()) return run_classify_isometry(g, iso);
    if (sub_cub->parsed()) return run_classify_cubic(g, cub);
    if (sub_scan->parsed()) return run_scan(g, sc);
    if (sub_gen->parsed()) return run_generate(g, gen);
    if (sub_ver->parsed()) return run_verify(g, ver);
    if (sub_s3s->parsed()) return run_s3_solve(g, s3s);
    if (sub_s3c->parsed()) return run_s3_check(g, s3c);
  } catch (const ToolError& e) {
    try {
      emit(g, error_report(e));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: %s\n", e.what());
    }
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return 2;
}
