#include "runner.hpp"
#include "scenario.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace alab::cli;

namespace {

const fs::path kScenarios = ALAB_SCENARIO_DIR;
const std::string kBinary = ALAB_CLI_BINARY;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("alab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Shell {
  int code;
  std::string out;
  std::string err;
};

Shell shell(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "'" + kBinary + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

int run_in_process(const fs::path& scenario, const fs::path& out, RunOptions options = {}) {
  std::ostringstream o, e;
  return run_command(scenario.string(), out.string(), options, o, e);
}

json report_at(const fs::path& dir) { return json::parse(read_file(dir / "report.json")); }

json without_timing(json report) {
  report.erase("wall_time_s");
  return report;
}

}  // namespace

TEST(Cli, EveryShippedScenarioMeetsItsExpectations) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const fs::path out = scratch("all_" + entry.path().stem().string());
    std::ostringstream o, e;
    const int code = run_command(entry.path().string(), out.string(), {}, o, e);
    EXPECT_EQ(code, kOk) << entry.path() << "\n" << e.str();
    const json report = report_at(out);
    EXPECT_EQ(report["status"], "ok") << entry.path();
    for (const json& ex : report["expectations"]) EXPECT_TRUE(ex["ok"].get<bool>()) << entry.path() << " " << ex.dump();
  }
  EXPECT_GE(count, 10);
}

TEST(Cli, UnknownManifoldNamesTheField) {
  const fs::path dir = scratch("sphere3");
  const fs::path s = write_file(dir, "s.json", R"({"manifold": "sphere3", "algebroid": {"type": "tangent"},
    "connection": "random_coefficient", "job": "classify"})");
  const Shell r = shell("run '" + s.string() + "' --out '" + (dir / "out").string() + "'", dir);
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find("manifold"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("sphere3"), std::string::npos) << r.err;
}

TEST(Cli, UnknownTopLevelFieldIsRejected) {
  const fs::path dir = scratch("unknown_field");
  const fs::path s = write_file(dir, "s.json", R"({"job": "classify", "algebroid": "so3_sphere", "bogus": 1})");
  try {
    parse_scenario(json::parse(read_file(s)));
    FAIL() << "accepted an unknown field";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Cli, MalformedMonomialPointsAtThePolynomial) {
  const json doc = json::parse(R"({"algebroid": "so3_sphere", "job": "classify",
    "connection": {"type": "coefficient", "gamma": [{"i": 1, "j": 1, "l": 2, "poly": {"y1^2": 1.0}}]}})");
  const Scenario s = parse_scenario(doc);
  const Model m = build_model(s);
  try {
    build_connection(*s.connection, "connection", m, s.seed);
    FAIL() << "accepted a bad monomial";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.field(), "connection.gamma[0].poly") << e.what();
  }
}

TEST(Cli, ConvergenceWritesTableAndSlope) {
  const fs::path out = scratch("convergence");
  ASSERT_EQ(run_in_process(kScenarios / "rkmk4_convergence.json", out), kOk);
  std::istringstream csv(read_file(out / "convergence_rkmk4.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "h,error,drift");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 5);
  const json report = report_at(out);
  const double slope = report["result"]["tables"][0]["slope"].get<double>();
  EXPECT_GE(slope, 3.7);
  EXPECT_LE(slope, 4.3);
}

TEST(Cli, ReportsAreDeterministicAcrossRunsAndJobs) {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const fs::path s = kScenarios / "so3_sphere_classify.json";
  ASSERT_EQ(run_in_process(s, a), kOk);
  ASSERT_EQ(run_in_process(s, b), kOk);
  RunOptions parallel;
  parallel.jobs = 3;
  ASSERT_EQ(run_in_process(s, c, parallel), kOk);
  EXPECT_EQ(without_timing(report_at(a)), without_timing(report_at(b)));
  EXPECT_EQ(without_timing(report_at(a)), without_timing(report_at(c)));
  EXPECT_EQ(read_file(a / "classification.csv"), read_file(c / "classification.csv"));
}

TEST(Cli, ListBuiltinsIsStableAndComplete) {
  std::ostringstream first, second;
  list_builtins(first);
  list_builtins(second);
  EXPECT_EQ(first.str(), second.str());
  for (const std::string name : {"so3_sphere", "se2_plane", "abelian_torus", "bla_sphere",
                                 "gauge_twisted_so3", "canonical_flat", "sphere2"}) {
    EXPECT_NE(first.str().find(name), std::string::npos) << name;
  }
  const fs::path dir = scratch("list");
  const Shell r = shell("list-builtins", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, first.str());
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit_codes");
  const fs::path mismatch = write_file(dir, "mismatch.json", R"({"algebroid": "so3_sphere",
    "connection": "canonical_flat", "probes": {"num_batteries": 2, "num_points": 6},
    "job": "classify", "expect": {"pre_lie": "holds"}})");
  const Shell m = shell("run '" + mismatch.string() + "' --out '" + (dir / "m").string() + "'", dir);
  EXPECT_EQ(m.code, kExpectMismatch);
  EXPECT_NE(m.err.find("pre_lie"), std::string::npos) << m.err;

  const fs::path blow = write_file(dir, "blow.json", R"({"job": {"type": "integrate",
    "method": "rk4_ambient", "h": 1, "horizon": 1000, "problem": {"kind": "sphere_test", "alpha": 100}}})");
  const Shell n = shell("run '" + blow.string() + "' --out '" + (dir / "n").string() + "'", dir);
  EXPECT_EQ(n.code, kNumericFailure);
  EXPECT_EQ(report_at(dir / "n")["status"], "numeric_failure");

  EXPECT_EQ(shell("run '" + (dir / "missing.json").string() + "' --out '" + (dir / "x").string() + "'", dir).code,
            kInputError);
  const fs::path broken = write_file(dir, "broken.json", "{\"job\": ");
  EXPECT_EQ(shell("run '" + broken.string() + "' --out '" + (dir / "x").string() + "'", dir).code, kInputError);
  EXPECT_EQ(shell("run", dir).code, kInputError);
  EXPECT_EQ(shell("--help", dir).code, 0);
  const Shell v = shell("--version", dir);
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(version()), std::string::npos);
}

TEST(Cli, SeedPrecedence) {
  const fs::path dir = scratch("seed");
  const fs::path s = write_file(dir, "s.json", R"({"seed": 5, "algebroid": "so3_sphere",
    "connection": "random_coefficient", "probes": {"num_batteries": 2, "num_points": 6}, "job": "classify"})");
  ASSERT_EQ(run_in_process(s, dir / "a"), kOk);
  EXPECT_EQ(report_at(dir / "a")["seed"], 5);

  ::setenv("ALGEBROID_LAB_SEED", "7", 1);
  ASSERT_EQ(run_in_process(s, dir / "b"), kOk);
  EXPECT_EQ(report_at(dir / "b")["seed"], 7);
  RunOptions explicit_seed;
  explicit_seed.seed = 9;
  ASSERT_EQ(run_in_process(s, dir / "c", explicit_seed), kOk);
  EXPECT_EQ(report_at(dir / "c")["seed"], 9);
  ::setenv("ALGEBROID_LAB_SEED", "seven", 1);
  EXPECT_EQ(run_in_process(s, dir / "d"), kInputError);
  ::unsetenv("ALGEBROID_LAB_SEED");

  EXPECT_NE(report_at(dir / "a")["result"], report_at(dir / "b")["result"]);
}

TEST(Cli, OutputsLeaveNoTemporaryFiles) {
  const fs::path out = scratch("tmpfiles");
  ASSERT_EQ(run_in_process(kScenarios / "se2_identities.json", out), kOk);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    ++files;
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
  EXPECT_EQ(files, 2);
  EXPECT_TRUE(fs::exists(out / "identities.csv"));
}
