#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ucp/acceptance.hpp"
#include "ucp/error.hpp"
#include "ucp/scenario.hpp"

namespace {

struct Overrides {
  std::vector<std::string> scenarios;
  std::optional<int> mesh;
  std::optional<double> epsilon, tau_min, tau_max;
  std::vector<double> radii;
  std::optional<std::string> out;
  std::optional<long long> seed;
  int jobs = 1;
};

void add_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--scenario", o.scenarios, "bundled scenario name or .ini path (repeatable)");
  cmd->add_option("--mesh", o.mesh, "solver nodes along x (odd)");
  cmd->add_option("--epsilon", o.epsilon, "weight exponent in (0, 1)");
  cmd->add_option("--tau-min", o.tau_min, "first tau sample");
  cmd->add_option("--tau-max", o.tau_max, "last tau sample");
  cmd->add_option("--radii", o.radii, "r,R,R0 for the flat three-spheres check")->delimiter(',')->expected(3);
  cmd->add_option("--out", o.out, "report directory");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--jobs", o.jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);
}

ucp::Scenario configure(const std::string& name, const Overrides& o, const std::vector<std::string>& stages) {
  auto s = ucp::Scenario::load(ucp::resolve_scenario(name));
  if (o.mesh) s.mesh = *o.mesh;
  if (o.epsilon) s.epsilon = *o.epsilon;
  if (o.tau_min) s.tau_min = *o.tau_min;
  if (o.tau_max) s.tau_max = *o.tau_max;
  if (o.radii.size() == 3) std::copy(o.radii.begin(), o.radii.end(), s.radii.begin());
  if (o.out) s.out = *o.out;
  if (o.seed) {
    if (*o.seed < 0) throw ucp::Error(ucp::ErrorKind::Config, "--seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(*o.seed);
  }
  if (!stages.empty()) s.stages = stages;
  s.validate();
  return s;
}

int run(const Overrides& o, const std::vector<std::string>& stages, bool acceptance) {
  std::vector<ucp::Scenario> batch;
  try {
    const auto names = o.scenarios.empty() ? std::vector<std::string>{"flat-biharmonic"} : o.scenarios;
    for (const auto& n : names) batch.push_back(configure(n, o, stages));
  } catch (const ucp::Error& e) {
    std::cerr << "ucplate: " << e.what() << '\n';
    return e.kind() == ucp::ErrorKind::Config ? ucp::kExitConfig : ucp::kExitSolver;
  }
  const auto outcomes = ucp::run_scenarios(batch, o.jobs);
  for (const auto& r : outcomes) {
    std::cout << r.name << ": " << (r.exit_code == ucp::kExitPass ? "PASS" : "FAIL");
    for (const auto& st : r.stages) std::cout << "  " << st.stage << '=' << (st.pass ? "pass" : "fail");
    std::cout << '\n';
    if (!r.message.empty()) std::cerr << r.name << ": " << r.message << '\n';
  }
  int code = ucp::combined_exit_code(outcomes);
  if (acceptance) {
    bool all = true;
    for (const auto& c : ucp::run_acceptance()) {
      std::cout << ucp::format_result(c) << '\n';
      all = all && c.pass;
    }
    if (!all) code = std::max(code, static_cast<int>(ucp::kExitVerification));
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary unique continuation checks for the Kirchhoff-Love plate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ucp::tool_version());

  struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> stages;  // empty: stages from the config
    bool acceptance = false;
  };
  const std::vector<Command> commands{
      {"run", "run the stages listed in the scenario", {}},
      {"flatten", "build and certify the conformal map", {"flatten"}},
      {"solve", "solve the clamped plate problem", {"solve"}},
      {"reflect", "reflect the solution and check the extension", {"reflect"}},
      {"carleman", "Carleman ratio sweep over tau", {"carleman"}},
      {"three-spheres", "three-spheres inequality at the boundary", {"three-spheres"}},
      {"sucp", "strong unique continuation lower bound", {"sucp"}},
      {"verify-all", "all stages plus the acceptance battery", ucp::stage_names(), true},
  };
  Overrides overrides;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_flags(sub, overrides);
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ucp::kExitConfig;
  }
  for (const auto& [sub, c] : subs)
    if (sub->parsed()) return run(overrides, c->stages, c->acceptance);
  return ucp::kExitConfig;
}
