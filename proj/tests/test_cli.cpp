#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

/* end-to-end checks of the installed tool: golden-file comparisons for the
   report formats, exit-code conventions, and the generate/scan and
   solve/check round trips.  set AFFSYM_REGEN_GOLDEN=1 to rewrite the golden
   files after an intentional format change. */

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(AFFSYM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

/* byte compare against tests/golden/<name>, or rewrite it when regenerating */
void check_golden(const std::string& name, const std::string& actual) {
  const std::string path = std::string(AFFSYM_GOLDEN_DIR) + "/" + name;
  if (std::getenv("AFFSYM_REGEN_GOLDEN")) {
    spit(path, actual);
    return;
  }
  const std::string want = slurp(path);
  if (actual != want) {
    size_t at = 0;
    while (at < actual.size() && at < want.size() && actual[at] == want[at]) ++at;
    CAPTURE(name);
    CAPTURE(at);
    CAPTURE(want.substr(at > 40 ? at - 40 : 0, 120));
    CAPTURE(actual.substr(at > 40 ? at - 40 : 0, 120));
    FAIL_CHECK("golden mismatch for " << name);
  } else {
    CHECK(actual == want);
  }
}

std::string temp_file(const char* stem) { return std::string("/tmp/affsym_cli_") + stem; }

}  // namespace

TEST_CASE("help exits zero, usage errors exit two") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("scan --help").exit_code == 0);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("generate").exit_code == 2);  // --family is required
  CHECK(run_cli("").exit_code == 2);          // a subcommand is required
}

TEST_CASE("classify-isometry golden and error reports") {
  const std::string in = temp_file("halfturn.json");
  spit(in, "{\"matrix\":[[1,0,0],[0,-1,0],[0,0,-1]]}\n");
  const RunResult r = run_cli("classify-isometry --in " + in);
  CHECK(r.exit_code == 0);
  check_golden("classify_isometry_halfturn.json", r.out);

  spit(in, "{\"matrix\":[[2,0,0],[0,1,0],[0,0,1]]}\n");
  const RunResult bad = run_cli("classify-isometry --in " + in);
  CHECK(bad.exit_code == 1);
  const json j = json::parse(bad.out);
  CHECK(j.at("status") == "error");
  CHECK(j.at("error") == "NotAnIsometry");

  CHECK(run_cli("classify-isometry --in /tmp/affsym_cli_does_not_exist.json").exit_code == 1);
  std::remove(in.c_str());
}

TEST_CASE("classify-isometry recovers an exact boost factor") {
  /* (l + 1/l)/2 = 1.25 and (l - 1/l)/2 = 0.75 for l = 2, so every entry is
     an exact binary fraction */
  const std::string in = temp_file("boost.json");
  spit(in, "{\"matrix\":[[1.25,0,0.75],[0,1,0],[0.75,0,1.25]]}\n");
  const RunResult r = run_cli("classify-isometry --in " + in);
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("family") == "Boost");
  CHECK(std::fabs(j.at("parameter").get<double>() - 2.0) < 1e-12);
  std::remove(in.c_str());
}

TEST_CASE("classify-cubic golden, dense route, and admissibility gate") {
  const std::string in = temp_file("cubic.json");
  spit(in, "{\"frame\":\"ONB\",\"coeffs\":[0,0,0,0,1,0,0]}\n");
  const RunResult r = run_cli("classify-cubic --in " + in);
  CHECK(r.exit_code == 0);
  check_golden("classify_cubic_z2xz2.json", r.out);
  const json j = json::parse(r.out);
  CHECK(j.at("class") == "Z2xZ2");

  /* dense route: same form written out as all ten coefficients */
  json dense_in;
  dense_in["frame"] = "ONB";
  {
    /* a5 pattern has C(ttv) = ... only the entries produced by the basis
       form; easiest is to round-trip through the tool itself, so feed the
       dense table that classify-cubic reports back */
    REQUIRE(j.contains("dense"));
    dense_in["dense"] = j.at("dense");
  }
  spit(in, dense_in.dump());
  const RunResult r2 = run_cli("classify-cubic --in " + in);
  CHECK(r2.exit_code == 0);
  const json j2 = json::parse(r2.out);
  CHECK(j2.at("class") == "Z2xZ2");
  CHECK(std::fabs(j2.at("params").at("a5").get<double>() - 1.0) < 1e-12);

  /* a trace-violating dense table is refused */
  json off;
  off["frame"] = "ONB";
  off["dense"] = std::vector<double>{1, 0, 0, 1, 0, 1, 0, 0, 0, 0};
  spit(in, off.dump());
  const RunResult r3 = run_cli("classify-cubic --in " + in);
  CHECK(r3.exit_code == 1);
  CHECK(json::parse(r3.out).at("error") == "NotAdmissible");
  std::remove(in.c_str());
}

TEST_CASE("scan at a single grid point matches its golden report and csv") {
  const std::string csv = temp_file("scan.csv");
  const RunResult r =
      run_cli("scan --family quadric-z2z2 --grid 0.45:0.55:1,0.45:0.55:1,0.45:0.55:1 --csv " +
              csv);
  CHECK(r.exit_code == 0);
  check_golden("scan_z2z2_point.json", r.out);
  check_golden("scan_z2z2_point.csv", slurp(csv));
  const json j = json::parse(r.out);
  CHECK(j.at("status") == "ok");
  CHECK(j.at("points").size() == 1);
  CHECK(j.at("points")[0].at("class") == "Z2xZ2");
  std::remove(csv.c_str());
}

TEST_CASE("scan output is identical across thread counts and runs") {
  const std::string args =
      "scan --family quadric-z2 --grid 0.3:0.7:2,0.4:0.6:1,0.45:0.55:1";
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args + " --threads 4");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("generate descriptor feeds scan and verify") {
  const std::string desc = temp_file("family.json");
  const RunResult gen = run_cli(
      "generate --family improper-a --base elliptic-paraboloid --c 1.5 --out " + desc);
  CHECK(gen.exit_code == 0);
  CHECK(gen.out.empty());  // --out moves the report off stdout
  check_golden("generate_improper_a.json", slurp(desc));
  const json j = json::parse(slurp(desc));
  CHECK(j.at("family") == "improper-a");
  CHECK(j.at("expected_class") == "SO2");
  CHECK(j.at("expected_mean_curvature").get<double>() == 0.0);

  const RunResult scan = run_cli("scan --in " + desc + " --grid 0.5:0.5:1,0:0:1,0:0:1");
  CHECK(scan.exit_code == 0);
  const json sj = json::parse(scan.out);
  CHECK(sj.at("points")[0].at("class") == "SO2");
  CHECK(std::fabs(sj.at("H_est").get<double>()) < 1e-5);
  std::remove(desc.c_str());
}

TEST_CASE("verify passes on a shipped family") {
  const RunResult r = run_cli("verify --family quadric-z2z2 --points 2");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("status") == "ok");
  for (const auto& c : j.at("checks")) CHECK(c.at("pass") == true);
}

TEST_CASE("s3-solve writes a field, s3-check validates it") {
  const std::string base = temp_file("field");
  const RunResult solve =
      run_cli("s3-solve --case h-1.ex --grid 17 --field " + base);
  CHECK(solve.exit_code == 0);
  const json j = json::parse(solve.out);
  CHECK(j.at("status") == "ok");
  CHECK(j.at("residual").get<double>() < 1e-6);
  check_golden("s3_field_h-1ex_17.csv", slurp(base + ".csv"));
  check_golden("s3_field_h-1ex_17.json", slurp(base + ".json"));

  const RunResult ok = run_cli("s3-check --in " + base + ".csv");
  CHECK(ok.exit_code == 0);
  CHECK(json::parse(ok.out).at("status") == "ok");

  /* checking against the wrong case must fail */
  const RunResult wrong = run_cli("s3-check --in " + base + ".csv --case h0.ex");
  CHECK(wrong.exit_code == 1);

  std::remove((base + ".csv").c_str());
  std::remove((base + ".json").c_str());
}

TEST_CASE("s3-solve reports nonconvergence with iteration count") {
  const RunResult r = run_cli("s3-solve --case h+1.ex --grid 17 --max-iter 2");
  CHECK(r.exit_code == 1);
  const json j = json::parse(r.out);
  CHECK(j.at("status") == "error");
  CHECK(j.at("error") == "DidNotConverge");
  CHECK(j.at("iterations").get<int>() == 2);
  CHECK(j.at("residual").get<double>() > 0.0);
}

TEST_CASE("unknown family is a tool error, not a crash") {
  const RunResult r = run_cli("scan --family no-such-family --grid 0:1:1,0:1:1,0:1:1");
  CHECK(r.exit_code == 1);
  CHECK(json::parse(r.out).at("error") == "IllegalParameter");
}
