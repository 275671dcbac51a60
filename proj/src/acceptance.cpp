#include "ucp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "ucp/analytic_field.hpp"
#include "ucp/carleman.hpp"
#include "ucp/conformal.hpp"
#include "ucp/error.hpp"
#include "ucp/material.hpp"
#include "ucp/plate.hpp"
#include "ucp/quadrature.hpp"
#include "ucp/reflection.hpp"
#include "ucp/scenario.hpp"
#include "ucp/taylor.hpp"
#include "ucp/threespheres.hpp"

namespace ucp {

namespace {

constexpr double kPi = std::numbers::pi;

// Frozen goldens.
constexpr double kCarlemanGolden[] = {0.001629579802, 0.06913614373, 0.02600147224, 0.002825985482, 0.1540510548};
constexpr double kFlatCempGolden = 2.157918643757775e-06;  // y^2 at (0.05, 0.1, 0.4), closed-form sigma
constexpr double kFlatCeiling = 2.5e-3;                    // y^2, y^3 sweep maximum 2.19e-3
constexpr double kCurvedCempGolden = 5.3847156200117795e-06;  // sine-perturbed, meshes 129

const char* const kBumps[] = {
    "bump((sqrt(x^2+y^2)-0.2)/0.1)",
    "bump((sqrt(x^2+y^2)-0.1)/0.2)",
    "bump((sqrt(x^2+y^2)-0.3)/0.2)",
    "bump((sqrt(x^2+y^2)-0.15)/0.1)*(1+0.5*x)",
    "bump((sqrt(x^2+y^2)-0.4)/0.3)*(1+0.3*y)",
};

struct Out {
  bool pass = true;
  std::ostringstream d;
  Out() { d << std::setprecision(4); }
  // Records a named check; failing checks are marked with '!'.
  void check(const std::string& name, bool ok) {
    pass = pass && ok;
    if (!ok) d << '!' << name << ' ';
  }
};

PlateMaterial unit_material() { return PlateMaterial::analytic(AnalyticField::parse("1"), AnalyticField::parse("1")); }

double max_error(const ScalarField& f, const AnalyticField& exact) {
  double e = 0.0;
  const Grid2D& g = f.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(f.at(i, j) - exact(g.x(i), g.y(j))));
  return e;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

double sigma_y2(double s) { return kPi * std::pow(s, 6) / 16.0; }

void c1(Out& o) {
  const Grid2D g(-1, 1, 0, 1, 257, 129);
  for (const char* text : {"y^2", "y^3"}) {
    const auto exact = AnalyticField::parse(text);
    const auto p = reflect_solution(exact.sample(g));
    const double e = std::max(max_error(p.w, exact), max_error(p.ubar, exact));
    o.d << text << " err=" << e << ' ';
    o.check(text, e <= 1e-12);
  }
}

void c2(Out& o) {
  double worst = 0.0;
  bool bounds = true;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    worst = std::max(worst, std::abs(weight_phi_quadrature(s, 0.5) - s / std::pow(1.0 + std::sqrt(s), 2)));
    if (i > 0) {
      const double p = weight_phi(s, 0.5);
      bounds = bounds && std::exp(-2.0) * s <= p && p <= s;
    }
  }
  o.d << "closed-form err=" << worst << " (<=1e-10) bounds=" << (bounds ? "ok" : "violated");
  o.check("closed-form", worst <= 1e-10);
  o.check("bounds", bounds);
}

void c3(Out& o) {
  double worst = 0.0;
  for (const auto& f : hardy_battery()) worst = std::max(worst, hardy_ratio(f).ratio);
  o.d << "battery max=" << worst << " (<=1.001) ";
  o.check("battery", worst <= 1.0 + 1e-3);
  double prev = 0.0;
  bool monotone = true;
  for (double d : {0.1, 0.05, 0.02, 0.01}) {
    const auto r = hardy_ratio({[d](double t) { return t < 1.0 ? std::pow(t, 0.5 + d) : 1.0; },
                                [d](double t) { return t < 1.0 ? (0.5 + d) * std::pow(t, d - 0.5) : 0.0; },
                                {1.0}});
    monotone = monotone && r.ratio > prev && r.ratio < 1.0;
    prev = r.ratio;
  }
  const double target = 1.02 / (4.0 * 0.51 * 0.51);
  o.d << "extremal(0.01)=" << prev << " vs " << target << " monotone=" << (monotone ? "yes" : "no");
  o.check("extremal", std::abs(prev - target) <= 0.02 * target);
  o.check("monotone", monotone);
}

void c4(Out& o) {
  std::vector<double> taus;
  for (int k = 0; k <= 18; ++k) taus.push_back(3.0 + 0.5 * k);
  const Grid2D g(-1, 1, -1, 1, 513, 513), fine(-1, 1, -1, 1, 1025, 1025);
  for (int b = 0; b < 5; ++b) {
    const auto rows = carleman_sweep(AnalyticField::parse(kBumps[b]).sample(g), taus);
    double m = 0.0;
    bool finite = true;
    for (const auto& r : rows) {
      finite = finite && std::isfinite(r.ratio);
      m = std::max(m, r.ratio);
    }
    double mf = 0.0;
    for (const auto& r : carleman_sweep(AnalyticField::parse(kBumps[b]).sample(fine), taus))
      mf = std::max(mf, std::isfinite(r.ratio) ? r.ratio : INFINITY);
    const double rel = std::abs(m / kCarlemanGolden[b] - 1.0);
    o.d << "b" << b + 1 << ":" << rel * 100 << "%," << mf / kCarlemanGolden[b] << "x ";
    o.check("finite", finite);
    o.check("golden", rel <= 0.05);
    o.check("refined", mf <= 10.0 * kCarlemanGolden[b]);
  }
}

void c5(Out& o) {
  const Grid2D half(-1, 1, 0, 1, 257, 129);
  const auto f = three_spheres_flat(AnalyticField::parse("y^2").sample(half), 0.05, 0.1, 0.4);
  double sig = 0.0;
  sig = std::max({std::abs(f.sigma_r / sigma_y2(0.05) - 1.0), std::abs(f.sigma_R / sigma_y2(0.1) - 1.0),
                  std::abs(f.sigma_R0 / sigma_y2(0.4) - 1.0)});
  const auto exact = three_spheres_from_sigma(sigma_y2(0.05), sigma_y2(0.1), sigma_y2(0.4), 0.05, 0.1, 0.4);
  o.d << "theta~=" << std::setprecision(17) << f.theta_tilde << std::setprecision(4) << " sigma rel=" << sig
      << " C_emp=" << f.C_emp << " ";
  o.check("theta", std::abs(f.theta_tilde - 0.25) <= 1e-15);
  o.check("sigma", sig <= 1e-6);
  o.check("golden", std::abs(exact.C_emp / kFlatCempGolden - 1.0) <= 1e-12);
  o.check("ceiling", f.C_emp <= kFlatCeiling);
  ThreeSpheresOptions opts;
  opts.ceiling = kFlatCeiling;
  int passed = 0;
  double worst = 0.0;
  for (const char* text : {"y^2", "y^3"}) {
    const auto u = AnalyticField::parse(text).sample(half);
    for (double r : {0.02, 0.04, 0.06, 0.08, 0.1})
      for (double R : {0.12, 0.16, 0.2, 0.28, 0.36}) {
        const auto s = three_spheres_flat(u, r, R, 0.8, opts);
        passed += s.pass;
        worst = std::max(worst, s.C_emp);
      }
  }
  o.d << "sweep " << passed << "/50 max C_emp=" << worst << " (<=" << kFlatCeiling << ")";
  o.check("sweep", passed == 50);
}

void c6(Out& o) {
  const double t = optimal_tau(sigma_y2(0.05), sigma_y2(0.4), 0.05, 0.4, 0.5);
  double worst = 0.0;
  for (double R : {0.08, 0.1, 0.15}) {
    const double p = -2.0 - 0.5 - 2.0 * t;
    const double left = std::pow(0.05 / 4.0 / R, p) * sigma_y2(0.05), right = std::pow(0.2 / R, p) * sigma_y2(0.4);
    worst = std::max(worst, std::abs(left / right - 1.0));
  }
  o.d << "tau*-1=" << t - 1.0 << " balance rel=" << worst;
  o.check("tau", std::abs(t - 1.0) <= 1e-12);
  o.check("balance", worst <= 1e-12);
}

ConformalOptions map_mesh(int n) {
  ConformalOptions co;
  co.flattening.nx = co.flattening.ny = n;
  return co;
}

void c7(Out& o) {
  const auto flat = build_conformal_map({1.0, 2.0, 1.0, UnivariateFunction::from_expression("0", -1.0, 1.0)}, map_mesh(33));
  const auto& f = flat.certificate();
  o.d << "flat CR=" << f.cauchy_riemann << " origin=" << f.origin_error << " K=" << f.K << "; ";
  o.check("flat-certified", f.certified);
  o.check("flat-CR", f.cauchy_riemann <= 1e-8);
  o.check("flat-origin", f.origin_error <= 1e-10);
  o.check("flat-K", f.K > 8.0);
  // 0.05 r0 (x/r0)^2 cos(x/r0) with r0 = 1.
  const BoundaryGraph curved{1.0, 6.0, 1.0, UnivariateFunction::from_expression("0.05*x^2*cos(x)", -1.0, 1.0)};
  std::vector<double> cr;
  double offset = 0.0;
  for (int n : {65, 129, 257}) {
    const auto c = build_conformal_map(curved, map_mesh(n)).certificate();
    o.check("certified-" + std::to_string(n), c.certified);
    o.check("b-a", c.b - c.a >= 4.0 * c.c0 * (1.0 - 1e-6) && c.b - c.a <= 4.0 * c.C0 * (1.0 + 1e-6));
    cr.push_back(c.cauchy_riemann);
    offset = std::max(offset, c.boundary_offset);
  }
  const double p1 = order(cr[0], cr[1]), p2 = order(cr[1], cr[2]);
  o.d << "curved CR orders " << p1 << "," << p2 << " boundary offset max=" << offset << " (round-off, <=1e-12)";
  o.check("CR-order", p1 >= 1.8 && p2 >= 1.8);
  o.check("offset", offset <= 1e-12);
}

void c8(Out& o) {
  const auto p = derive_point(1.0, 1.0, 1.0);
  const double e = std::max({std::abs(p.nu - 0.25), std::abs(p.E - 2.5), std::abs(p.B - 2.0 / 9.0)});
  o.d << "(nu,E,B) err=" << e << ' ';
  o.check("point", e <= 1e-14);
  double lower = 0.0;
  for (auto [l, m] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.0, 3.0}}) {
    const auto c = derive_coefficients(
        PlateMaterial::analytic(AnalyticField::parse(std::to_string(l)), AnalyticField::parse(std::to_string(m))),
        Grid2D(-1, 1, 0, 1, 33, 17));
    lower = std::max({lower, c.a1.max_abs(), c.a2.max_abs()});
    for (const auto& row : c.q2)
      for (const auto& q : row) lower = std::max(lower, q.max_abs());
  }
  o.d << "constant-material lower-order max=" << lower;
  o.check("zero", lower == 0.0);
}

// L(v) from jets of the moduli: B lap^2 v + 2 grad B . grad lap v + sum D_ij v_ij + lap N lap v.
double operator_oracle(const char* lambda, const char* mu, const AnalyticField& v, double x, double y) {
  using J = Taylor2<2>;
  const J X = J::variable_x(x), Y = J::variable_y(y);
  const J L = AnalyticField::parse(lambda).expression()(X, Y);
  const J M = AnalyticField::parse(mu).expression()(X, Y);
  const J nu = L / (2.0 * (L + M));
  const J E = M * (3.0 * L + 2.0 * M) / (L + M);
  const J B = E / (12.0 * (1.0 - nu * nu));
  const J D = B * (1.0 - nu), N = B * nu;
  auto d = [&](int i, int j) { return v.derivative(i, j, x, y); };
  const double lapv = d(2, 0) + d(0, 2);
  const double bilap = d(4, 0) + 2.0 * d(2, 2) + d(0, 4);
  return B.value() * bilap +
         2.0 * (B.derivative(1, 0) * (d(3, 0) + d(1, 2)) + B.derivative(0, 1) * (d(2, 1) + d(0, 3))) +
         D.derivative(2, 0) * d(2, 0) + 2.0 * D.derivative(1, 1) * d(1, 1) + D.derivative(0, 2) * d(0, 2) +
         (N.derivative(2, 0) + N.derivative(0, 2)) * lapv;
}

void c9(Out& o) {
  const auto y2 = AnalyticField::parse("y^2");
  for (int n : {65, 129, 257}) {
    const Grid2D g(-1, 1, 0, 1, n, n);
    const double e = max_error(solve_plate({g, unit_material(), {}, boundary_from(y2)}).v, y2);
    const double h = g.hx();
    o.d << "y2@" << n << "=" << e << ' ';
    o.check("y2-" + std::to_string(n), e <= 5.0 * h * h * 1.0);
  }
  // The y^2 error sits at round-off, so the order comes from a manufactured solution.
  const char* lambda = "1 + 0.3*sin(x)*y";
  const char* mu = "1 + 0.2*cos(x + y)";
  const auto mat = PlateMaterial::analytic(AnalyticField::parse(lambda), AnalyticField::parse(mu));
  const auto exact = AnalyticField::parse("y^2*cos(x)");
  auto forcing = [&](double x, double y) { return operator_oracle(lambda, mu, exact, x, y); };
  std::vector<double> err, weak;
  for (int n : {65, 129, 257}) {
    err.push_back(max_error(solve_plate({Grid2D(-1, 1, 0, 1, n, n), mat, forcing, boundary_from(exact)}).v, exact));
    const auto u = solve_plate({Grid2D(-1, 1, 0, 1, n, (n + 1) / 2), unit_material(), {}, boundary_from(exact)}).v;
    weak.push_back(verify_weak_form(reflect_solution(u).ubar, std::nullopt, default_test_functions()).max_residual);
  }
  const double p1 = order(err[0], err[1]), p2 = order(err[1], err[2]);
  const double w1 = order(weak[0], weak[1]), w2 = order(weak[1], weak[2]);
  o.d << "manufactured orders " << p1 << "," << p2 << " weak-form orders " << w1 << "," << w2;
  o.check("order", p1 >= 1.8 && p2 >= 1.8);
  o.check("weak-order", w1 >= 1.8 && w2 >= 1.8);
}

void c10(Out& o) {
  std::vector<Scenario> batch;
  for (const auto& name : bundled_scenarios()) {
    auto s = Scenario::load(resolve_scenario(name));
    s.stages = {"solve", "reflect"};
    batch.push_back(s);
  }
  RunOptions ro;
  ro.write = false;
  const auto outs = run_scenarios(batch, static_cast<int>(batch.size()), ro);
  o.check("bundled", !outs.empty());
  for (const auto& r : outs) {
    if (r.exit_code != kExitPass && r.stages.size() < 2) {
      o.d << r.name << ": " << r.message << ' ';
      o.check(r.name, false);
      continue;
    }
    const auto& rep = r.stages.back().report["result"];
    const double m = rep["traces"]["max_identity"].get<double>(), b = rep["trace_bound"].get<double>();
    o.d << r.name << " " << m << "/" << b << ' ';
    o.check(r.name, rep["traces_pass"].get<bool>());
  }
}

void c11(Out& o) {
  const auto u = AnalyticField::parse("y^2").sample(Grid2D(-1, 1, 0, 1, 257, 129));
  std::vector<double> radii;
  for (int k = 0; k < 14; ++k) radii.push_back(0.01 * std::pow(1.3, k));
  const double p = vanishing_order(radii, region_norm_profile(u, radii));
  const auto s = sucp_lower_bound({sigma_y2(0.005), sigma_y2(0.02), sigma_y2(0.8), 0.005, 0.02, 0.8, 2.0, 0.5});
  const auto v = AnalyticField::parse("exp(-1/sqrt(x^2+y^2))");
  const auto n = sucp_lower_bound(
      {region_norm(v, 0.005), region_norm(v, 0.02), region_norm(v, 0.8), 0.005, 0.02, 0.8, 2.0, 0.5});
  bool rejects = false;
  try {
    sucp_lower_bound({1, 1e12, 1, 0.002, 0.01, 0.8, 2.0, 0.05});
  } catch (const Error& e) {
    rejects = e.kind() == ErrorKind::Certification;
  }
  o.d << "order=" << p << " A=" << s.A << " control flagged=" << (!n.pass ? "yes" : "no");
  o.check("order", std::abs(p - 6.0) <= 0.05);
  o.check("A", s.A < 1.0 && s.pass && rejects);
  o.check("control", !n.pass);
}

void c12(Out& o) {
  // Worst case over a battery of constant-material clamped solutions, per radius.
  const Grid2D g(-1, 1, 0, 1, 129, 65);
  const char* outers[] = {"y^2", "y^2*cos(x)", "y^2*(1+x+y)", "x^2*y^2 - y^4/3", "y^3", "y^2*exp(x)"};
  const double rs[] = {0.2, 0.4, 0.8};
  std::array<std::array<double, 3>, 4> worst{};
  double single = 0.0;  // largest per-solution spread, reported only
  for (const char* text : outers) {
    const auto u = solve_plate({g, unit_material(), {}, boundary_from(AnalyticField::parse(text))}).v;
    std::array<std::array<double, 3>, 4> own{};
    for (int k = 0; k < 3; ++k) {
      const auto c = caccioppoli_check(u, rs[k]);
      for (int h = 0; h < 4; ++h) {
        own[h][k] = c.C[h];
        worst[h][k] = std::max(worst[h][k], c.C[h]);
      }
    }
    for (const auto& row : own)
      if (*std::min_element(row.begin(), row.end()) > 1e-8)
        single = std::max(single, *std::max_element(row.begin(), row.end()) / *std::min_element(row.begin(), row.end()));
  }
  for (int h = 0; h < 4; ++h) {
    const double spread = *std::max_element(worst[h].begin(), worst[h].end()) /
                          *std::min_element(worst[h].begin(), worst[h].end());
    o.d << "C" << h + 1 << " spread=" << spread << ' ';
    o.check("C" + std::to_string(h + 1), spread <= 3.0);
  }
  o.d << "(single-solution spread up to " << single << ", not gated)";
}

void c13(Out& o) {
  auto s = Scenario::load(resolve_scenario("sine-perturbed"));
  s.stages = {"flatten", "solve", "three-spheres"};
  RunOptions ro;
  ro.write = false;
  const auto r = run_scenario(s, ro);
  if (r.exit_code != kExitPass && r.stages.size() < 3) {
    o.d << r.message;
    o.check("run", false);
    return;
  }
  const auto& rep = r.stages.back().report["result"]["report"];
  const double theta = rep["theta"].get<double>();
  const double tt = rep["flat"]["theta_tilde"].get<double>();
  const double cemp = rep["flat"]["C_emp"].get<double>();
  const double rel = std::abs(cemp / kCurvedCempGolden - 1.0);
  o.d << "theta~=" << tt << " theta=" << theta << " C_emp=" << cemp << " (" << rel * 100 << "% from golden)";
  o.check("pass", rep["pass"].get<bool>());
  o.check("theta", tt >= theta);
  o.check("finite", std::isfinite(cemp));
  o.check("golden", rel <= 0.1);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Out&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "reflection fixed points", c1},
      {2, "weight closed form and bounds", c2},
      {3, "Hardy ratio battery and sharpness", c3},
      {4, "Carleman sweep goldens", c4},
      {5, "flat three spheres for exact solutions", c5},
      {6, "tau* balancing", c6},
      {7, "conformal certification", c7},
      {8, "coefficient derivation", c8},
      {9, "solver accuracy and weak form", c9},
      {10, "trace identities on bundled scenarios", c10},
      {11, "strong unique continuation bound", c11},
      {12, "Caccioppoli stability", c12},
      {13, "curved three spheres end to end", c13},
  };
  return all;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& selection) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (!selection.empty() && std::find(selection.begin(), selection.end(), c.id) == selection.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Out o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.d << "error: " << e.what();
    }
    CriterionResult r{c.id, c.title, o.pass, o.d.str(),
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
    while (!r.detail.empty() && r.detail.back() == ' ') r.detail.pop_back();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << 'C' << std::setw(2) << std::setfill('0') << r.id << std::setfill(' ') << (r.pass ? " PASS  " : " FAIL  ")
    << r.title << "  [" << r.detail << "] (" << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return s.str();
}

}  // namespace ucp
