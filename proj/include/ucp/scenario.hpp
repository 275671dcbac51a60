#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ucp {

// Sectioned key/value config. Every key has a default; unknown keys are rejected.
struct Scenario {
  std::string name = "unnamed";
  std::uint64_t seed = 1;

  // [boundary]
  std::string g = "0";
  double r0 = 1.0, M0 = 2.0, alpha = 1.0;

  // [material]
  std::string lambda = "1", mu = "1";
  double thickness = 1.0;

  // [solver]
  int mesh = 129;      // nodes along x; y gets (mesh + 1) / 2
  int map_mesh = 129;  // conformal map mesh (square)
  std::string outer = "y^2";
  std::string forcing = "0";  // right-hand side of div div(...) = f; flat boundaries only
  std::string exact;          // optional, flat boundaries only

  // [carleman]
  double epsilon = 0.5;
  double tau_min = 3.0, tau_max = 12.0;
  int tau_samples = 19;
  double tau_bar = 3.0, R_tilde0 = 1.0;
  std::string bump = "bump((sqrt(x^2+y^2)-0.2)/0.1)";
  int carleman_mesh = 257;

  // [three_spheres]
  std::array<double, 3> radii{0.05, 0.1, 0.4};  // r, R, R0 for flat boundaries
  double R0_curved = 0.8;
  double r1_fraction = 0.15, r2_fraction = 0.5;  // of c r0, curved boundaries
  std::vector<double> exponents{0.0, 1.0, 2.0, 4.0, 8.0};
  double ceiling = 10.0;

  // [sucp]
  std::array<double, 3> sucp_radii{0.005, 0.02, 0.8};  // r1, r2, r0
  double sucp_C = 2.0, sucp_c = 0.5;

  // [output]
  std::string out = "out";
  std::vector<std::string> stages{"flatten", "solve", "reflect", "carleman", "three-spheres", "sucp"};

  bool curved() const;

  // Throws Config naming the offending section.key.
  static Scenario parse(const std::string& ini_text);
  static Scenario load(const std::filesystem::path& path);
  std::string to_ini() const;
  nlohmann::json to_json() const;

  // Throws Config for inconsistent values (radii order, stage names, meshes).
  void validate() const;
};

// Pipeline order.
const std::vector<std::string>& stage_names();

// A bare name resolves to <bundled dir>/<name>.ini.
std::filesystem::path resolve_scenario(const std::string& name_or_path);
std::filesystem::path bundled_scenario_dir();
std::vector<std::string> bundled_scenarios();

std::string tool_version();

// Writes to a temporary sibling, then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

enum ExitCode { kExitPass = 0, kExitVerification = 1, kExitConfig = 2, kExitSolver = 3 };

struct StageOutcome {
  std::string stage;
  bool pass = false;
  nlohmann::json report;
};

struct ScenarioOutcome {
  std::string name;
  std::vector<StageOutcome> stages;
  bool pass = false;
  int exit_code = kExitPass;
  std::string failed_stage;  // first stage that threw
  std::string message;
  nlohmann::json summary;
};

struct RunOptions {
  bool write = true;  // reports under <out>/<name>/
};

// Runs the stages named in the scenario in pipeline order, adding the stages they depend on.
// Errors inside a stage end the run with the stage name in the message.
ScenarioOutcome run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Worker pool over scenarios; results keep the input order.
std::vector<ScenarioOutcome> run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                                           const RunOptions& options = {});

// Worst exit code of a batch.
int combined_exit_code(const std::vector<ScenarioOutcome>& outcomes);

}  // namespace ucp
