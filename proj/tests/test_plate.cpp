#include <gtest/gtest.h>

#include <cmath>

#include "ucp/material.hpp"
#include "ucp/plate.hpp"

using namespace ucp;

namespace {

PlateMaterial constant_material(double lambda = 1.0, double mu = 1.0) {
  return PlateMaterial::analytic(AnalyticField::parse(std::to_string(lambda)),
                                 AnalyticField::parse(std::to_string(mu)));
}

PlateMaterial variable_material() {
  return PlateMaterial::analytic(AnalyticField::parse("1 + 0.3*sin(x)*y"), AnalyticField::parse("1 + 0.2*cos(x + y)"));
}

// L(v) = B lap^2 v + 2 grad B . grad lap v + sum D_ij v_ij + lap N lap v, from
// jets of the moduli; independent of the library's coefficient code.
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
  return B.value() * bilap + 2.0 * (B.derivative(1, 0) * (d(3, 0) + d(1, 2)) + B.derivative(0, 1) * (d(2, 1) + d(0, 3))) +
         D.derivative(2, 0) * d(2, 0) + 2.0 * D.derivative(1, 1) * d(1, 1) + D.derivative(0, 2) * d(0, 2) +
         (N.derivative(2, 0) + N.derivative(0, 2)) * lapv;
}

double max_error(const ScalarField& f, const AnalyticField& exact) {
  double e = 0.0;
  const Grid2D& g = f.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(f.at(i, j) - exact(g.x(i), g.y(j))));
  return e;
}

}  // namespace

TEST(Material, DerivedModuliForUnitLame) {
  const auto p = derive_point(1.0, 1.0, 1.0);
  EXPECT_NEAR(p.nu, 0.25, 1e-14);
  EXPECT_NEAR(p.E, 2.5, 1e-14);
  EXPECT_NEAR(p.B, 2.0 / 9.0, 1e-14);
  const auto q = derive_point(0.0, 1.0, 1.0);
  EXPECT_EQ(q.nu, 0.0);
  EXPECT_NEAR(q.E, 2.0, 1e-14);
  EXPECT_NEAR(q.B, 1.0 / 6.0, 1e-14);
  // Thickness enters as h^3.
  EXPECT_NEAR(derive_point(1.0, 1.0, 2.0).B, 16.0 / 9.0, 1e-14);
}

TEST(Material, ConstantModuliGiveVanishingLowerOrderTerms) {
  const Grid2D g(-1, 1, 0, 1, 9, 9);
  const auto c = derive_coefficients(constant_material(2.0, 0.5), g);
  EXPECT_EQ(c.a1.max_abs(), 0.0);
  EXPECT_EQ(c.a2.max_abs(), 0.0);
  for (const auto& row : c.q2)
    for (const auto& q : row) EXPECT_EQ(q.max_abs(), 0.0);
}

TEST(Material, ConvexityViolationNamesTheNode) {
  const Grid2D g(-1, 1, 0, 1, 5, 5);
  const auto m = PlateMaterial::analytic(AnalyticField::parse("1"), AnalyticField::parse("x"));
  try {
    m.validate(g);
    FAIL() << "expected an invalid-material error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidMaterial);
    EXPECT_NE(std::string(e.what()).find("node (0, 0)"), std::string::npos);
  }
  const auto bad_gamma = PlateMaterial::analytic(AnalyticField::parse("-1"), AnalyticField::parse("1"));
  EXPECT_THROW(bad_gamma.validate(g), Error);
}

TEST(Material, SampledAndAnalyticCoefficientsAgree) {
  const Grid2D g(-1, 1, 0, 1, 129, 65);
  const auto lam = AnalyticField::parse("1 + 0.3*sin(x)*y"), mu = AnalyticField::parse("1 + 0.2*cos(x + y)");
  const auto an = variable_material();
  const auto sm = PlateMaterial::sampled(lam.sample(g), mu.sample(g));
  for (double x : {-0.5, 0.1, 0.6})
    for (double y : {0.3, 0.7}) {
      const auto a = an.at(x, y), s = sm.at(x, y);
      EXPECT_NEAR(a.B, s.B, 1e-9);
      EXPECT_NEAR(a.a1, s.a1, 1e-6);
      EXPECT_NEAR(a.a2, s.a2, 1e-6);
      EXPECT_NEAR(a.q11, s.q11, 1e-5);
      EXPECT_NEAR(a.q12, s.q12, 1e-5);
      EXPECT_NEAR(a.q22, s.q22, 1e-5);
    }
  EXPECT_THROW(sm.at(2.0, 0.5), Error);
}

TEST(Plate, RecoversQuadraticClampedSolution) {
  const auto exact = AnalyticField::parse("y^2");
  for (int n : {17, 33, 65}) {
    PlateProblem p{Grid2D(-1, 1, 0, 1, n, n), constant_material(), {}, boundary_from(exact)};
    const auto s = solve_plate(p);
    EXPECT_EQ(s.report.linear.method, "sparse LDLT");
    EXPECT_LT(max_error(s.v, exact), 1e-10);
    EXPECT_EQ(s.report.clamped_value, 0.0);
    EXPECT_LT(s.report.clamped_normal_fd, 1e-10);
    EXPECT_GT(s.report.linear.condition_estimate, 1.0);
  }
}

TEST(Plate, ZeroDataGivesZero) {
  PlateProblem p{Grid2D(-1, 1, 0, 1, 33, 33), variable_material(), {}, {}};
  EXPECT_EQ(solve_plate(p).v.max_abs(), 0.0);
}

TEST(Plate, SolutionIsLinearInOuterData) {
  const Grid2D g(-1, 1, 0, 1, 33, 33);
  const auto f1 = AnalyticField::parse("y^2*cos(x)"), f2 = AnalyticField::parse("y^2*(1 + x*y)");
  const auto s1 = solve_plate({g, variable_material(), {}, boundary_from(f1)}).v;
  const auto s2 = solve_plate({g, variable_material(), {}, boundary_from(f2)}).v;
  const auto mix = AnalyticField::parse("2*y^2*cos(x) - 3*y^2*(1 + x*y)");
  const auto s12 = solve_plate({g, variable_material(), {}, boundary_from(mix)}).v;
  EXPECT_LT((s12 - (2.0 * s1 - 3.0 * s2)).max_abs(), 1e-10);
}

TEST(Plate, ManufacturedSolutionConvergesAtSecondOrder) {
  const auto exact = AnalyticField::parse("y^2*cos(x)");
  auto forcing = [&](double x, double y) {
    return operator_oracle("1 + 0.3*sin(x)*y", "1 + 0.2*cos(x + y)", exact, x, y);
  };
  std::vector<double> err;
  for (int n : {33, 65, 129}) {
    PlateProblem p{Grid2D(-1, 1, 0, 1, n, n), variable_material(), forcing, boundary_from(exact)};
    err.push_back(max_error(solve_plate(p).v, exact));
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 1.8);
  EXPECT_GT(std::log2(err[1] / err[2]), 1.8);
}

TEST(Plate, NondivergenceSolverMatchesManufacturedSolution) {
  const auto exact = AnalyticField::parse("y^2*cos(x)");
  const auto mat = variable_material();
  std::vector<double> err;
  for (int n : {33, 65, 129}) {
    const Grid2D g(-1, 1, 0, 1, n, n);
    auto forcing = [&](double x, double y) {
      return operator_oracle("1 + 0.3*sin(x)*y", "1 + 0.2*cos(x + y)", exact, x, y) / mat.at(x, y).B;
    };
    NondivProblem p{g, plate_coefficients(mat, g), forcing, boundary_from(exact)};
    const auto s = solve_nondiv(p);
    EXPECT_EQ(s.report.linear.method, "sparse LU");
    err.push_back(max_error(s.v, exact));
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 1.8);
  EXPECT_GT(std::log2(err[1] / err[2]), 1.8);
}

TEST(Plate, ResidualOfCubicVanishesForConstantMaterial) {
  const Grid2D g(-1, 1, 0, 1, 257, 257);
  const auto r = residual_nondiv(AnalyticField::parse("y^3").sample(g), constant_material());
  EXPECT_TRUE(r.shrunk);
  EXPECT_LE(r.interior_max, 1e-8);
}

TEST(Plate, DivergenceAndNondivergenceFormsAgree) {
  // L(v) = B (lap^2 v - a.grad lap v - q(v)) with both sides from differences.
  const auto mat = variable_material();
  for (const char* text : {"y^2", "sin(2*x)*y^2 + x*y^3", "exp(x - y)*y^2"}) {
    const auto v = AnalyticField::parse(text);
    std::vector<double> err;
    for (int n : {33, 65}) {
      const Grid2D g(-1, 1, 0, 1, n, n);
      const auto vs = v.sample(g);
      const auto div = apply_divergence_operator(vs, mat);
      const auto res = residual_nondiv(vs, mat, {}, 6);
      double e = 0.0;
      for (int j = 6; j < n - 6; ++j)
        for (int i = 6; i < n - 6; ++i) {
          const double B = mat.at(g.x(i), g.y(j)).B;
          e = std::max(e, std::abs(div.at(i, j) - B * res.residual.at(i, j)));
          EXPECT_NEAR(div.at(i, j), operator_oracle("1 + 0.3*sin(x)*y", "1 + 0.2*cos(x + y)", v, g.x(i), g.y(j)),
                      1e-2);
        }
      err.push_back(e);
    }
    EXPECT_LT(err[1], 1e-3) << text;
    if (err[0] > 1e-10) EXPECT_GT(std::log2(err[0] / err[1]), 1.8) << text;
  }
}

TEST(Plate, IllConditionedSystemReportsEstimate) {
  PlateProblem p{Grid2D(-1, 1, 0, 1, 17, 17), constant_material(), {}, {}};
  SolverOptions o;
  o.condition_threshold = 10.0;
  try {
    solve_plate(p, o);
    FAIL() << "expected a solver error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Solver);
    EXPECT_NE(std::string(e.what()).find("condition estimate"), std::string::npos);
  }
}
