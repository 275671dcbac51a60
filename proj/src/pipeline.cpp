#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "ucp/analytic_field.hpp"
#include "ucp/carleman.hpp"
#include "ucp/conformal.hpp"
#include "ucp/error.hpp"
#include "ucp/parallel.hpp"
#include "ucp/plate.hpp"
#include "ucp/quadrature.hpp"
#include "ucp/reflection.hpp"
#include "ucp/scenario.hpp"
#include "ucp/threespheres.hpp"

namespace ucp {

namespace {

// Weak-form residual bound for the reflected solver pair, in units of h^2.
constexpr double kWeakFormConstant = 2.0;  // y^2 cos x outer data measures 0.17
// Trace identities at y = 0, in units of h^2, on |x| <= kTraceHalfWidth.
constexpr double kTraceConstant = 10.0;
constexpr double kTraceHalfWidth = 0.5;
constexpr int kWeakFormDiscs = 8;

bool is_zero_text(const std::string& t) { return t == "0" || t == "0.0"; }

// Uniform in [lo, hi) from the raw 53 high bits; distribution objects differ between standard libraries.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<TestFunction> random_discs(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TestFunction> discs;
  while (static_cast<int>(discs.size()) < kWeakFormDiscs) {
    const TestFunction t{uniform(rng, -0.4, 0.4), uniform(rng, -0.15, 0.15), uniform(rng, 0.2, 0.45)};
    if (std::hypot(t.cx, t.cy) + t.radius < 0.9 && t.radius > std::abs(t.cy)) discs.push_back(t);
  }
  return discs;
}

std::vector<double> tau_samples(const Scenario& s) {
  std::vector<double> taus;
  if (s.tau_samples == 1) return {s.tau_min};
  for (int k = 0; k < s.tau_samples; ++k)
    taus.push_back(s.tau_min + (s.tau_max - s.tau_min) * k / (s.tau_samples - 1));
  return taus;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

struct Context {
  const Scenario& s;
  PlateMaterial material;
  Grid2D grid;
  std::shared_ptr<ConformalMap> map;
  std::optional<ScalarField> u;  // flat-side solution on grid
  std::map<std::string, std::string> csv;  // file name -> content
};

StageOutcome stage_flatten(Context& c) {
  const BoundaryGraph graph{c.s.r0, c.s.M0, c.s.alpha, UnivariateFunction::from_expression(c.s.g, -c.s.r0, c.s.r0)};
  ConformalOptions co;
  co.flattening.nx = co.flattening.ny = c.s.map_mesh;
  c.map = std::make_shared<ConformalMap>(build_conformal_map(graph, co));
  return {"flatten", c.map->certified(), {{"certificate", c.map->certificate().to_json()}}};
}

StageOutcome stage_solve(Context& c) {
  const auto outer = boundary_from(AnalyticField::parse(c.s.outer));
  PlateSolution sol;
  nlohmann::json r;
  if (c.s.curved()) {
    const auto pc = pullback_coefficients(*c.map, c.material, c.grid);
    sol = solve_nondiv({c.grid, pc.coeffs, {}, outer});
    r["form"] = "pulled-back non-divergence";
    r["coefficients"] = {{"a_sup", pc.a_sup}, {"c_sup", pc.c_sup}, {"M1", pc.M1}, {"J_max", pc.J.max_abs()}};
  } else {
    std::function<double(double, double)> f;
    if (!is_zero_text(c.s.forcing)) f = [e = AnalyticField::parse(c.s.forcing)](double x, double y) { return e(x, y); };
    sol = solve_plate({c.grid, c.material, f, outer});
    r["form"] = "divergence";
  }
  c.u = sol.v;
  const auto& lin = sol.report.linear;
  r["linear"] = {{"unknowns", lin.unknowns},
                 {"method", lin.method},
                 {"condition_estimate", lin.condition_estimate},
                 {"relative_residual", lin.relative_residual}};
  r["clamped_value"] = sol.report.clamped_value;
  r["clamped_normal_fd"] = sol.report.clamped_normal_fd;
  r["max_abs"] = sol.v.max_abs();
  bool pass = sol.v.all_finite();
  if (!c.s.exact.empty()) {
    const auto exact = AnalyticField::parse(c.s.exact);
    double err = 0.0, norm = 0.0;
    for (int j = 0; j < c.grid.ny; ++j)
      for (int i = 0; i < c.grid.nx; ++i) {
        const double e = exact(c.grid.x(i), c.grid.y(j));
        err = std::max(err, std::abs(sol.v.at(i, j) - e));
        norm = std::max(norm, std::abs(e));
      }
    const double h = c.grid.hx(), bound = 5.0 * h * h * norm;
    r["exact"] = {{"max_error", err}, {"bound", bound}, {"pass", err <= bound}};
    pass = pass && err <= bound;
  }
  return {"solve", pass, r};
}

StageOutcome stage_reflect(Context& c) {
  auto pair = reflect_solution(*c.u);
  const auto traces = trace_report(pair, kTraceHalfWidth);
  const double h = c.grid.hx();
  const bool traces_ok = traces.max_identity() <= kTraceConstant * h * h;
  nlohmann::json r{{"traces", traces.to_json()},
                   {"trace_bound", kTraceConstant * h * h},
                   {"traces_pass", traces_ok}};
  // The weak form tests lap^2 only, so it gates flat constant-material scenarios.
  const bool gated = !c.s.curved() && c.material.is_constant();
  if (!is_zero_text(c.s.forcing)) {
    const double B = c.material.at(0.0, 0.0).B;
    const auto f = AnalyticField::parse(c.s.forcing);
    pair = with_source(std::move(pair), ScalarField::sample(c.grid, [&](double x, double y) { return f(x, y) / B; }));
  }
  const auto discs = random_discs(c.s.seed);
  const auto weak = verify_weak_form(pair, discs);
  nlohmann::json d = nlohmann::json::array();
  for (const auto& t : discs) d.push_back({t.cx, t.cy, t.radius});
  r["weak_form"] = {{"discs", d},
                    {"residuals", weak.residuals},
                    {"max_residual", weak.max_residual},
                    {"bound", kWeakFormConstant * h * h},
                    {"gated", gated}};
  const bool weak_ok = !gated || weak.max_residual <= kWeakFormConstant * h * h;
  r["weak_form"]["pass"] = weak_ok;
  return {"reflect", traces_ok && weak_ok, r};
}

StageOutcome stage_carleman(Context& c) {
  const int n = c.s.carleman_mesh;
  const auto U = AnalyticField::parse(c.s.bump).sample(Grid2D(-1, 1, -1, 1, n, n));
  CarlemanOptions o;
  o.epsilon = c.s.epsilon;
  o.R_tilde0 = c.s.R_tilde0;
  const auto rows = carleman_sweep(U, tau_samples(c.s), o);
  bool finite = true;
  double max_ratio = 0.0;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows) {
    finite = finite && std::isfinite(row.ratio) && !row.violation_candidate;
    max_ratio = std::max(max_ratio, row.ratio);
    table.push_back({{"tau", row.tau}, {"terms", row.terms}, {"lhs", row.lhs}, {"rhs", row.rhs},
                     {"ratio", finite_or_null(row.ratio)}, {"violation_candidate", row.violation_candidate}});
  }
  c.csv["carleman.csv"] = sweep_csv(rows);
  const CarlemanWeight w{c.s.epsilon, c.s.tau_bar, c.s.R_tilde0};
  return {"carleman", finite,
          {{"weight", w.to_json()}, {"bump", c.s.bump}, {"mesh", n}, {"max_ratio", max_ratio}, {"rows", table}}};
}

ThreeSpheresOptions sphere_options(const Scenario& s) {
  ThreeSpheresOptions o;
  o.epsilon = s.epsilon;
  o.exponent_grid = s.exponents;
  o.ceiling = s.ceiling;
  o.tau_tilde = s.tau_bar;
  return o;
}

StageOutcome stage_three_spheres(Context& c) {
  if (!c.s.curved()) {
    const auto f = three_spheres_flat(*c.u, c.s.radii[0], c.s.radii[1], c.s.radii[2], sphere_options(c.s));
    return {"three-spheres", f.pass, {{"kind", "flat"}, {"options", sphere_options(c.s).to_json()}, {"report", f.to_json()}}};
  }
  CurvedOptions o{sphere_options(c.s), c.s.R0_curved};
  const double cc = o.R0 / (2.0 * c.map->certificate().K), r0 = c.map->certificate().r0;
  const ScalarField v(c.grid, c.u->values(), std::make_shared<ConformalChart>(c.map));
  const auto rep = three_spheres_curved(v, *c.map, c.material, c.s.r1_fraction * cc * r0,
                                        c.s.r2_fraction * cc * r0, c.grid, o);
  return {"three-spheres", rep.pass, {{"kind", "curved"}, {"options", o.to_json()}, {"report", rep.to_json()}}};
}

StageOutcome stage_sucp(Context& c) {
  const auto& rr = c.s.sucp_radii;
  const auto sigma = region_norm_profile(*c.u, {rr[0], rr[1], rr[2]});
  const auto rep = sucp_lower_bound({sigma[0], sigma[1], sigma[2], rr[0], rr[1], rr[2], c.s.sucp_C, c.s.sucp_c});
  std::vector<double> radii;
  for (int k = 0; k < 14; ++k) radii.push_back(2.0 * rr[0] * std::pow(1.3, k));
  const auto profile = region_norm_profile(*c.u, radii);
  std::ostringstream csv;
  csv.precision(17);
  csv << "radius,sigma\n";
  for (std::size_t k = 0; k < radii.size(); ++k) csv << radii[k] << ',' << profile[k] << '\n';
  c.csv["sucp_profile.csv"] = csv.str();
  nlohmann::json r{{"report", rep.to_json()}, {"radii", rr}, {"C", c.s.sucp_C}, {"c", c.s.sucp_c}};
  try {
    r["vanishing_order"] = vanishing_order(radii, profile);
  } catch (const Error&) {
    r["vanishing_order"] = nullptr;
  }
  return {"sucp", rep.pass, r};
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidInput:
    case ErrorKind::OutOfRange:
    case ErrorKind::InvalidMaterial:
      return kExitConfig;
    case ErrorKind::Certification:
    case ErrorKind::TraceIdentity:
    case ErrorKind::NonExactness:
    case ErrorKind::Degenerate:
    case ErrorKind::NotApplicable:
      return kExitVerification;
    default:
      return kExitSolver;
  }
}

std::vector<std::string> expand_stages(const Scenario& s) {
  std::set<std::string> want(s.stages.begin(), s.stages.end());
  if (want.count("reflect") || want.count("three-spheres") || want.count("sucp")) want.insert("solve");
  if (want.count("solve") && s.curved()) want.insert("flatten");
  std::vector<std::string> out;
  for (const auto& n : stage_names())
    if (want.count(n)) out.push_back(n);
  return out;
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& s, const RunOptions& options) {
  ScenarioOutcome out;
  out.name = s.name;
  const nlohmann::json config = s.to_json();
  const std::filesystem::path dir = std::filesystem::path(s.out) / s.name;
  auto envelope = [&](const std::string& stage, bool pass, const nlohmann::json& result) {
    return nlohmann::json{{"stage", stage}, {"version", tool_version()}, {"config", config},
                          {"pass", pass},   {"result", result}};
  };
  std::string current;
  try {
    s.validate();
    Context c{s, PlateMaterial::analytic(AnalyticField::parse(s.lambda), AnalyticField::parse(s.mu), s.thickness),
              Grid2D(-1, 1, 0, 1, s.mesh, (s.mesh + 1) / 2), nullptr, std::nullopt, {}};
    for (const auto& stage : expand_stages(s)) {
      current = stage;
      StageOutcome o;
      if (stage == "flatten") o = stage_flatten(c);
      else if (stage == "solve") o = stage_solve(c);
      else if (stage == "reflect") o = stage_reflect(c);
      else if (stage == "carleman") o = stage_carleman(c);
      else if (stage == "three-spheres") o = stage_three_spheres(c);
      else o = stage_sucp(c);
      o.report = envelope(stage, o.pass, o.report);
      out.stages.push_back(std::move(o));
    }
    current.clear();
    if (options.write) {
      for (const auto& o : out.stages) write_atomic(dir / (o.stage + ".json"), o.report.dump(2) + "\n");
      for (const auto& [file, content] : c.csv) write_atomic(dir / file, content);
    }
    out.pass = std::all_of(out.stages.begin(), out.stages.end(), [](const StageOutcome& o) { return o.pass; });
    out.exit_code = out.pass ? kExitPass : kExitVerification;
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.failed_stage = current;
    out.message = current.empty() ? e.what() : "stage " + current + ": " + e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitSolver;
    out.failed_stage = current;
    out.message = current.empty() ? e.what() : "stage " + current + ": " + e.what();
  }
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& o : out.stages) stages.push_back({{"stage", o.stage}, {"pass", o.pass}});
  out.summary = envelope("summary", out.pass, {{"name", s.name}, {"stages", stages}, {"exit_code", out.exit_code}});
  if (!out.message.empty()) out.summary["result"]["error"] = {{"stage", out.failed_stage}, {"message", out.message}};
  if (options.write) {
    try {
      write_atomic(dir / "summary.json", out.summary.dump(2) + "\n");
    } catch (const std::exception& e) {
      if (out.message.empty()) out.message = e.what();
      out.exit_code = std::max(out.exit_code, static_cast<int>(kExitSolver));
    }
  }
  return out;
}

std::vector<ScenarioOutcome> run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                                           const RunOptions& options) {
  std::vector<ScenarioOutcome> out(scenarios.size());
  parallel_for(static_cast<int>(scenarios.size()), [&](int k) { out[k] = run_scenario(scenarios[k], options); },
               static_cast<unsigned>(std::max(1, jobs)));
  return out;
}

int combined_exit_code(const std::vector<ScenarioOutcome>& outcomes) {
  int code = kExitPass;
  for (const auto& o : outcomes) code = std::max(code, o.exit_code);
  return code;
}

}  // namespace ucp
