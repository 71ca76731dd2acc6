#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SMTT_CLI_PATH;
const fs::path kGolden = SMTT_GOLDEN_DIR;

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smtt_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(const fs::path& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

const std::string kWorked = "6\n10 11 10 10 11 10\n15 11 13 11 12 11\n";

}  // namespace

TEST_CASE("solve reports the schedule as JSON") {
  const fs::path dir = scratch("solve");
  const fs::path inst = dir / "inst.txt";
  spit(inst, kWorked);

  auto res = run_cli(dir, "solve \"" + inst.string() + "\" --method mddc");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j["method"] == "mddc");
  CHECK(j["n"] == 6);
  CHECK(j["objective"] == 141);
  CHECK(j["order"] == std::vector<int>{3, 5, 2, 0, 1, 4});
  CHECK(j["elapsed_seconds"].is_number());

  res = run_cli(dir, "solve \"" + inst.string() + "\" --method dp");
  REQUIRE(res.exit_code == 0);
  CHECK(nlohmann::json::parse(res.out)["objective"] == 141);

  res = run_cli(dir, "solve \"" + inst.string() + "\" --method brute");
  REQUIRE(res.exit_code == 0);
  CHECK(nlohmann::json::parse(res.out)["objective"] == 141);

  res = run_cli(dir, "solve \"" + inst.string() + "\" --method edd");
  REQUIRE(res.exit_code == 0);
  CHECK(nlohmann::json::parse(res.out)["objective"] == 145);

  res = run_cli(dir, "solve \"" + inst.string() + "\" --expr \"max(P + T, D)\"");
  REQUIRE(res.exit_code == 0);
  j = nlohmann::json::parse(res.out);
  CHECK(j["method"] == "expr");
  CHECK(j["expression"] == "max(P + T, D)");
  CHECK(j["objective"] == 141);
}

TEST_CASE("usage errors exit with 2") {
  const fs::path dir = scratch("usage");
  const fs::path inst = dir / "inst.txt";
  spit(inst, kWorked);

  CHECK(run_cli(dir, "--nonsense").exit_code == 2);
  CHECK(run_cli(dir, "frobnicate").exit_code == 2);
  CHECK(run_cli(dir, "gen").exit_code == 2);  // --out is required
  CHECK(run_cli(dir, "solve \"" + inst.string() + "\" --method bogus").exit_code ==
        2);
  CHECK(run_cli(dir, "bench --data \"" + dir.string() + "\" --oracle file")
            .exit_code == 2);
  CHECK(run_cli(dir, "discover --mutator http").exit_code == 2);
  CHECK(run_cli(dir, "--help").exit_code == 0);
}

TEST_CASE("domain errors exit with 3") {
  const fs::path dir = scratch("domain");

  auto res = run_cli(dir, "solve \"" + (dir / "missing.txt").string() + "\"");
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("error:") != std::string::npos);

  // 23 jobs exceed the subset-DP cap.
  std::string big = "23\n";
  for (int i = 0; i < 23; ++i) big += i ? " 1" : "1";
  big += "\n";
  for (int i = 0; i < 23; ++i) big += i ? " 0" : "0";
  big += "\n";
  const fs::path big_path = dir / "big.txt";
  spit(big_path, big);
  res = run_cli(dir, "solve \"" + big_path.string() + "\" --method dp");
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("cap 22") != std::string::npos);
  CHECK(res.err.find("MiB") != std::string::npos);
}

TEST_CASE("generate, benchmark, and export round trip") {
  const fs::path dir = scratch("roundtrip");
  const fs::path data = dir / "data";

  auto res = run_cli(dir, "gen --out \"" + data.string() +
                              "\" --n 6 --per-class 1 --seed 5");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("wrote 20 instances in 20 classes") != std::string::npos);
  const std::string manifest = slurp(data / "manifest.csv");
  CHECK(count_lines(manifest) == 21);
  CHECK(manifest.rfind("class_id,n,rdd,tf,distribution,instance_path,seed\n", 0) ==
        0);

  const fs::path gap = dir / "gap.csv";
  const fs::path rec = dir / "rec.csv";
  res = run_cli(dir, "bench --data \"" + data.string() +
                         "\" --methods mddc,edd --oracle dp --out \"" +
                         gap.string() + "\" --records \"" + rec.string() + "\"");
  REQUIRE(res.exit_code == 0);
  const std::string gap_csv = slurp(gap);
  CHECK(gap_csv.rfind("n,rdd,tf,mddc,edd,optimal_mean,count\n", 0) == 0);
  CHECK(gap_csv.find("\nAverage,,,") != std::string::npos);
  const std::string rec_csv = slurp(rec);
  CHECK(rec_csv.rfind(
            "instance_id,n,rdd,tf,method,objective,optimal,gap_percent,"
            "elapsed_seconds\n",
            0) == 0);
  // One row per instance for each heuristic plus the oracle run itself.
  CHECK(count_lines(rec_csv) == 1 + 20 * 3);
  CHECK(rec_csv.find(",dp,") != std::string::npos);

  // Benchmarking against an optima file that misses the instances fails loudly.
  const fs::path optima = dir / "optima.csv";
  spit(optima, "instance_id,optimal\nno_such_instance,5\n");
  res = run_cli(dir, "bench --data \"" + data.string() +
                         "\" --methods mddc --oracle file --optima \"" +
                         optima.string() + "\"");
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("error:") != std::string::npos);
}

TEST_CASE("export-lp reproduces the model writer byte for byte") {
  const fs::path dir = scratch("lp");
  const fs::path small = dir / "small.txt";
  spit(small, "2\n5 3\n4 6\n");
  const fs::path out = dir / "model.lp";

  auto res = run_cli(dir, "export-lp \"" + small.string() + "\" --out \"" +
                              out.string() + "\"");
  REQUIRE(res.exit_code == 0);
  CHECK(slurp(out) == slurp(kGolden / "model_n2.lp"));

  const fs::path six = dir / "six.txt";
  spit(six, kWorked);
  res = run_cli(dir, "export-lp \"" + six.string() + "\" --vi --out \"" +
                         out.string() + "\"");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("wrote 66 rows") != std::string::npos);
  CHECK(slurp(out) == slurp(kGolden / "model_n6_vi.lp"));
}

TEST_CASE("discover runs a short search") {
  const fs::path dir = scratch("discover");
  const fs::path result = dir / "result.json";
  const fs::path log = dir / "log.csv";

  auto res = run_cli(dir, "discover --iterations 5 --seed 9 --out \"" +
                              result.string() + "\" --log \"" + log.string() +
                              "\"");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(slurp(result));
  CHECK(j["expression"].is_string());
  CHECK(j["score"].is_number());
  CHECK(j["iterations_run"] == 5);
  CHECK(j["resets"].is_array());
  const std::string log_csv = slurp(log);
  CHECK(log_csv.rfind("iteration,candidate_score,best_score,island\n", 0) == 0);
  CHECK(count_lines(log_csv) == 6);
}
