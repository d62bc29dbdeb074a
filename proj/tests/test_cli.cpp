#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "snsrs/config.hpp"

namespace {

std::string cli_path() {
  const char* p = std::getenv("SNSRS_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SNSRS_CLI must point at the CLI binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string temp_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/snsrs_cli_test_XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    return std::string(tmpl);
  }();
  return dir;
}

std::string row_a_config_path() {
  static std::string path = [] {
    snsrs::Config c;
    c.protocol.p_v = 0.5;
    c.protocol.p_x = 0.1;
    c.protocol.p_y = 0.1;
    c.protocol.p_z = 0.3;
    c.protocol.mu_x = 0.1;
    c.protocol.mu_y = 0.3;
    c.protocol.mu_z = 0.45;
    c.protocol.m = 2;
    c.protocol.lambda_slice = 0.05;
    c.protocol.N = 1e8;
    c.channel = {170.0, 0.2, 0.5, 1e-8, 0.03};
    std::string p = temp_dir() + "/row_a.conf";
    std::ofstream out(p);
    out << snsrs::serialize_config(c);
    return p;
  }();
  return path;
}

// Field of a CSV line, 0-based.
std::string field(const std::string& line, int index) {
  std::istringstream in(line);
  std::string f;
  for (int i = 0; i <= index; ++i) {
    if (!std::getline(in, f, ',')) return "";
  }
  return f;
}

std::string second_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("rate: working point produces a positive key rate") {
  RunResult r = run("rate --config " + row_a_config_path() +
                    " --distance-km 170 --m 2 --seed 1 --budget 4000");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("distance_km,") == 0);
  std::string row = second_line(r.output);
  double rate = std::stod(field(row, 16));
  CHECK(rate > 0.0);
  CHECK(field(row, 1) == "2");
}

TEST_CASE("rate: zero key at extreme loss is a valid result") {
  RunResult r = run("rate --config " + row_a_config_path() +
                    " --distance-km 600 --m 2 --seed 1 --budget 200");
  CHECK(r.exit_code == 0);
  double rate = std::stod(field(second_line(r.output), 16));
  CHECK(rate == 0.0);
}

TEST_CASE("rate: reruns are byte-identical") {
  std::string out1 = temp_dir() + "/rate1.csv";
  std::string out2 = temp_dir() + "/rate2.csv";
  std::string args = "rate --config " + row_a_config_path() +
                     " --distance-km 120 --m 1 --seed 9 --budget 500 --out ";
  REQUIRE(run(args + out1).exit_code == 0);
  REQUIRE(run(args + out2).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));

  SUBCASE("manifest records command, seed, rng, and the config snapshot") {
    std::string manifest = slurp(out1 + ".manifest");
    CHECK(manifest.find("command = rate --config") != std::string::npos);
    CHECK(manifest.find("seed = 9") != std::string::npos);
    CHECK(manifest.find("rng = mt19937_64") != std::string::npos);
    CHECK(manifest.find("epsilon_spent = ") != std::string::npos);
    CHECK(manifest.find("config.p_v = ") != std::string::npos);
    CHECK(manifest.find("config.N = ") != std::string::npos);
  }
}

TEST_CASE("replay reproduces the original CSV byte-for-byte") {
  std::string out = temp_dir() + "/scan.csv";
  std::string args = "scan --config " + row_a_config_path() +
                     " --from-km 50 --to-km 90 --step-km 20 --m 1 --m 2"
                     " --seed 4 --budget 400 --out " +
                     out;
  REQUIRE(run(args).exit_code == 0);
  std::string original = slurp(out);
  CHECK(original.find("distance_km,") == 0);

  // replay overwrites the same --out path from the manifest's command line
  RunResult r = run("replay " + out + ".manifest");
  CHECK(r.exit_code == 0);
  CHECK(slurp(out) == original);
}

TEST_CASE("validate: simulated counts agree with the analytic model") {
  RunResult r = run("validate --config " + row_a_config_path() +
                    " --trials 200000 --seed 12 --sigma 4");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("flagged=0") != std::string::npos);
  CHECK(r.output.find("rng=mt19937_64") != std::string::npos);
}

TEST_CASE("validate: an impossible sigma threshold fails with exit 1") {
  RunResult r = run("validate --config " + row_a_config_path() +
                    " --trials 200000 --seed 12 --sigma 0.0001");
  CHECK(r.exit_code == 1);
}

TEST_CASE("usage errors exit with code 2") {
  SUBCASE("missing required option") {
    CHECK(run("rate --distance-km 170").exit_code == 2);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run("frobnicate").exit_code == 2);
  }
  SUBCASE("validate requires at least one trial") {
    CHECK(run("validate --config " + row_a_config_path() + " --trials 0")
              .exit_code == 2);
  }
  SUBCASE("nonexistent config file") {
    CHECK(run("rate --config /nonexistent.conf --distance-km 10").exit_code ==
          2);
  }
  SUBCASE("invalid config values") {
    std::string bad = temp_dir() + "/bad.conf";
    std::ofstream(bad) << "p_v = 0.9\np_x = 0.9\n";
    RunResult r = run("rate --config " + bad + " --distance-km 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("invalid configuration") != std::string::npos);
  }
}

TEST_CASE("table2: built-in comparison table has the fixed layout") {
  std::string out = temp_dir() + "/table2.csv";
  // tiny budget: layout check only, not accuracy
  RunResult r = run("table2 --seed 1 --budget 60 --out " + out);
  CHECK(r.exit_code == 0);
  std::string csv = slurp(out);
  CHECK(csv.find("method,rate_250km,rate_300km,rate_350km,flags") == 0);
  CHECK(csv.find("\nPLOB-2,") != std::string::npos);
  CHECK(csv.find("\nSNS,") != std::string::npos);
  CHECK(csv.find("\nm=2,") != std::string::npos);
  CHECK(csv.find("\nm=6,") != std::string::npos);
  CHECK(csv.find("\nm=20,") != std::string::npos);
  CHECK(csv.find("\nAOPP,") != std::string::npos);
  CHECK(csv.find("reference_not_computed") != std::string::npos);
  // PLOB row is exact regardless of budget
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(std::stod(field(line, 1)) == doctest::Approx(1.442702254e-5).epsilon(1e-9));
}
