#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ucp/error.hpp"
#include "ucp/scenario.hpp"

using namespace ucp;
namespace fs = std::filesystem;

namespace {

struct Command {
  int code = -1;
  std::string output;  // stdout and stderr
};

Command run_cli(const std::string& args) {
  Command c;
  FILE* p = popen((std::string(UCPLATE_BINARY) + " " + args + " 2>&1").c_str(), "r");
  if (!p) return c;
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), p)) c.output += buf.data();
  const int status = pclose(p);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("ucp_test_scenario_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Config, BundledScenariosRoundTrip) {
  const auto names = bundled_scenarios();
  ASSERT_EQ(names.size(), 3u);
  for (const auto& n : names) {
    const auto a = Scenario::load(resolve_scenario(n));
    EXPECT_EQ(a.name, n);
    const auto b = Scenario::parse(a.to_ini());
    EXPECT_EQ(a.to_json(), b.to_json()) << n;
    EXPECT_EQ(a.to_ini(), b.to_ini()) << n;
  }
}

TEST(Config, RandomValuesRoundTripExactly) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Scenario s;
    s.seed = rng();
    s.M0 = 1.0 + 20.0 * U(rng);
    s.thickness = std::ldexp(U(rng), -7);
    s.epsilon = U(rng) * 0.98 + 0.01;
    s.tau_min = 3.0 * U(rng);
    s.tau_max = s.tau_min + 10.0 * U(rng);
    s.radii = {0.01 + 0.01 * U(rng), 0.05 + 0.05 * U(rng), 0.4 + 0.5 * U(rng)};
    s.exponents = {U(rng), 1.0 / 3.0, 1e-300, 1e300};
    s.lambda = "1 + " + std::to_string(k) + "*x^2";
    const auto t = Scenario::parse(s.to_ini());
    EXPECT_EQ(s.to_json(), t.to_json());
    EXPECT_EQ(t.seed, s.seed);
    EXPECT_EQ(t.thickness, s.thickness);
  }
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    Scenario::parse("[solver]\nmesch = 65\n");
    FAIL() << "expected a config error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    EXPECT_NE(std::string(e.what()).find("mesch"), std::string::npos);
  }
  EXPECT_THROW(Scenario::parse("[solvers]\nmesh = 65\n"), Error);
  EXPECT_THROW(Scenario::parse("[solver]\nmesh = 64\n"), Error);
  EXPECT_THROW(Scenario::parse("[solver]\nmesh = many\n"), Error);
  EXPECT_THROW(Scenario::parse("[three_spheres]\nradii = 0.1,0.05,0.4\n"), Error);
  EXPECT_THROW(Scenario::parse("[output]\nstages = solve,plot\n"), Error);
  EXPECT_THROW(Scenario::parse("[boundary]\ng = 0.1*x^2\n[solver]\nforcing = 1\n"), Error);
}

TEST(Pipeline, FlatBiharmonicPassesAndWritesReports) {
  auto s = Scenario::load(resolve_scenario("flat-biharmonic"));
  const auto dir = scratch("flat");
  s.out = dir.string();
  const auto r = run_scenario(s);
  EXPECT_TRUE(r.pass) << r.message;
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto summary = read_json(dir / s.name / "summary.json");
  EXPECT_TRUE(summary["pass"].get<bool>());
  EXPECT_EQ(summary["version"], tool_version());
  for (const auto& st : stage_names()) {
    const auto rep = read_json(dir / s.name / (st + ".json"));
    EXPECT_EQ(rep["config"], s.to_json()) << st;
    EXPECT_EQ(rep["version"], tool_version());
  }
  for (const auto& e : fs::recursive_directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Pipeline, IdenticalRunsAreByteIdentical) {
  auto s = Scenario::load(resolve_scenario("flat-variable"));
  s.mesh = 65;
  s.carleman_mesh = 129;
  const auto dir = scratch("det");
  s.out = dir.string();
  ASSERT_TRUE(run_scenario(s).pass);
  std::map<fs::path, std::string> first;
  for (const auto& e : fs::directory_iterator(dir / s.name)) first[e.path()] = slurp(e.path());
  ASSERT_TRUE(run_scenario(s).pass);
  for (const auto& [path, bytes] : first) EXPECT_EQ(slurp(path), bytes) << path.filename();
  EXPECT_EQ(first.size(), 9u);
}

TEST(Pipeline, DependentStagesAreAdded) {
  auto s = Scenario::load(resolve_scenario("flat-biharmonic"));
  s.stages = {"sucp"};
  RunOptions o;
  o.write = false;
  const auto r = run_scenario(s, o);
  ASSERT_EQ(r.stages.size(), 2u);
  EXPECT_EQ(r.stages[0].stage, "solve");
  EXPECT_EQ(r.stages[1].stage, "sucp");
}

TEST(Pipeline, VerificationFailureAndStageErrors) {
  auto s = Scenario::load(resolve_scenario("flat-biharmonic"));
  s.stages = {"three-spheres"};
  s.ceiling = 1e-9;
  RunOptions o;
  o.write = false;
  auto r = run_scenario(s, o);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.exit_code, kExitVerification);
  // Outer data that is not clamped is rejected inside the reflect stage.
  s.stages = {"reflect"};
  s.outer = "y";
  s.exact.clear();
  r = run_scenario(s, o);
  EXPECT_NE(r.exit_code, kExitPass);
  EXPECT_EQ(r.failed_stage, "reflect");
  EXPECT_NE(r.message.find("reflect"), std::string::npos);
}

TEST(Pipeline, WorkerPoolKeepsOrder) {
  std::vector<Scenario> batch;
  for (const auto& n : bundled_scenarios()) {
    auto s = Scenario::load(resolve_scenario(n));
    s.stages = {"solve"};
    batch.push_back(s);
  }
  RunOptions o;
  o.write = false;
  const auto r = run_scenarios(batch, 3, o);
  ASSERT_EQ(r.size(), batch.size());
  for (std::size_t k = 0; k < r.size(); ++k) EXPECT_EQ(r[k].name, batch[k].name);
  EXPECT_EQ(combined_exit_code(r), kExitPass);
}

TEST(Cli, MisspelledKeyExitsWithConfigError) {
  const auto dir = scratch("cli_bad");
  std::ofstream(dir / "bad.ini") << "[scenario]\nname = bad\n[solver]\nmesch = 65\n";
  const auto c = run_cli("solve --scenario " + (dir / "bad.ini").string());
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.output.find("mesch"), std::string::npos) << c.output;
  EXPECT_EQ(run_cli("solve --mesh").code, 2);
}

TEST(Cli, CarlemanWritesOneRowPerTau) {
  const auto dir = scratch("cli_carleman");
  const auto c = run_cli("carleman --tau-min 3 --tau-max 12 --out " + dir.string());
  ASSERT_EQ(c.code, 0) << c.output;
  const auto csv = slurp(dir / "flat-biharmonic" / "carleman.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + Scenario{}.tau_samples);
  EXPECT_EQ(csv.rfind("tau,lhs,rhs,ratio\n", 0), 0u);
}

TEST(Cli, ThreeSpheresRadiiOverride) {
  const auto dir = scratch("cli_spheres");
  const auto c = run_cli("three-spheres --radii 0.05,0.1,0.4 --out " + dir.string());
  ASSERT_EQ(c.code, 0) << c.output;
  const auto rep = read_json(dir / "flat-biharmonic" / "three-spheres.json");
  EXPECT_DOUBLE_EQ(rep["result"]["report"]["theta_tilde"].get<double>(), 0.25);
  EXPECT_EQ(run_cli("three-spheres --radii 0.1,0.05,0.4 --out " + dir.string()).code, 2);
}

TEST(Cli, VerifyAllOnFlatBiharmonic) {
  const auto dir = scratch("cli_verify");
  const auto c = run_cli("verify-all --scenario flat-biharmonic --jobs 2 --out " + dir.string());
  EXPECT_EQ(c.code, 0) << c.output;
  EXPECT_NE(c.output.find("C13 PASS"), std::string::npos);
}
