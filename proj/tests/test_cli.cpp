// End-to-end checks of the command-line tool: exit codes, reports, and
// bit-identical reruns. Locations come from the environment set by ctest.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli() {
  const char* p = std::getenv("PSS_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string preset_dir() {
  const char* p = std::getenv("PSS_PRESET_DIR");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + cli() + " " + args + " > /tmp/pss_cli_out.txt 2>/tmp/pss_cli_err.txt";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

}  // namespace

TEST_CASE("verify: pass, fail, and config error exit codes") {
  CHECK(run("verify --family " + preset_dir() + "/linear-t2.cfg --samples 1000 --tol 1e-9") == 0);

  write("/tmp/pss_bad_t3.cfg", "branch = t3\nlambda = 1\neta = 1\nm1 = 0\nm2 = 2\n");
  CHECK(run("verify --family /tmp/pss_bad_t3.cfg") == 1);
  CHECK(slurp("/tmp/pss_cli_err.txt").find("m2") != std::string::npos);

  write("/tmp/pss_malformed.cfg", "branch t2\n");
  CHECK(run("verify --family /tmp/pss_malformed.cfg") == 2);
  CHECK(slurp("/tmp/pss_cli_err.txt").find("line 1") != std::string::npos);

  CHECK(run("verify --family " + preset_dir() + "/linear-t2.cfg --mode fd --tol 1e-6") == 0);
}

TEST_CASE("certify prints verdicts for both outcomes") {
  CHECK(run("certify --family ch") == 0);
  CHECK(slurp("/tmp/pss_cli_out.txt").find("NONEXISTENT, obstruction=1") != std::string::npos);

  CHECK(run("certify --family linear-t2 --out /tmp/pss_cert.csv") == 0);
  const std::string out = slurp("/tmp/pss_cli_out.txt");
  CHECK(out.find("UNIVERSAL_EXISTS, Prop 1(i)") != std::string::npos);
  CHECK(slurp("/tmp/pss_cert.csv").find("x,t,a,b,c,gauss_residual,masked") != std::string::npos);

  CHECK(run("certify --family t5i-ref") == 0);
  const std::string t5i = slurp("/tmp/pss_cli_out.txt");
  CHECK(t5i.find("NONEXISTENT") != std::string::npos);
  CHECK(t5i.find("k1=") != std::string::npos);
  CHECK(t5i.find("k2=") != std::string::npos);
}

TEST_CASE("solve writes csv and rejects missing output") {
  CHECK(run("solve --family " + preset_dir() + "/ch.cfg --ic cos --n 64 --dt 2e-3 --tmax 0.1 --out /tmp/pss_sol.csv") == 0);
  const std::string csv = slurp("/tmp/pss_sol.csv");
  CHECK(csv.find("t,x0,x1") != std::string::npos);
  CHECK(run("solve --family ch --ic cos --n 64 --dt 2e-3 --tmax 0.1") == 2);
}

TEST_CASE("identical configuration and seed give bit-identical outputs") {
  const std::string base =
      "verify --family linear-t2 --samples 300 --seed 9 --report /tmp/pss_rep";
  CHECK(run(base + "1.csv") == 0);
  CHECK(run(base + "2.csv") == 0);
  CHECK(slurp("/tmp/pss_rep1.csv") == slurp("/tmp/pss_rep2.csv"));

  const std::string s =
      "solve --family ch --ic cos --n 64 --dt 2e-3 --tmax 0.05 --seed 4 --out /tmp/pss_s";
  CHECK(run(s + "1.csv") == 0);
  CHECK(run(s + "2.csv") == 0);
  CHECK(slurp("/tmp/pss_s1.csv") == slurp("/tmp/pss_s2.csv"));

  // The worker cap must not change results.
  CHECK(run("verify --family linear-t2 --samples 300 --seed 9 --report /tmp/pss_rep3.csv",
            "PSS_THREADS=1 ") == 0);
  CHECK(slurp("/tmp/pss_rep3.csv") == slurp("/tmp/pss_rep1.csv"));
}

TEST_CASE("immerse chain produces a surface and metrics") {
  CHECK(run("immerse --family linear-t2 --preset-exact k=1 --n 65 "
            "--out /tmp/pss_cli_surf.obj --metrics /tmp/pss_cli_metrics.csv") == 0);
  const std::string obj = slurp("/tmp/pss_cli_surf.obj");
  CHECK(obj.find("v ") != std::string::npos);
  CHECK(obj.find("f ") != std::string::npos);
  const std::string metrics = slurp("/tmp/pss_cli_metrics.csv");
  CHECK(metrics.find("x,t,E,F,G,K,a_rec,b_rec,c_rec,closure_defect") != std::string::npos);

  // Mismatched m between family file and the exact preset is refused.
  CHECK(run("immerse --family linear-t2 --preset-exact k=1,m=2 --n 33 --out /tmp/x.obj") == 2);
}

TEST_CASE("linear problem reports holonomy") {
  CHECK(run("linear-problem --family linear-t2 --preset-exact k=1 --n 33 --out /tmp/pss_holo.csv") == 0);
  CHECK(slurp("/tmp/pss_cli_out.txt").find("holonomy defect max") != std::string::npos);
  CHECK(slurp("/tmp/pss_holo.csv").find("x,t,v1,v2,holonomy") != std::string::npos);
}

TEST_CASE("solved field feeds the immersion pipeline") {
  // Solve the linear member on a matched window, then immerse from the csv.
  const int rc = run(
      "solve --family linear-t2 --ic cos --n 64 --dt 5e-3 --tmax 0.2 --snap-every 8 "
      "--out /tmp/pss_sol_imm.csv");
  CHECK(rc == 0);
  // 64 x-points over [0, 2pi); slice to the part of the x-strip inside it.
  const int rc2 = run(
      "immerse --family linear-t2 --solution /tmp/pss_sol_imm.csv "
      "--window 0,0.46,0,0.2 --length 6.283185307179586 "
      "--out /tmp/pss_sol_imm.obj");
  CHECK(rc2 == 0);
}
