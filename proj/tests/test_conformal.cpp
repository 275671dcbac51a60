#include <gtest/gtest.h>

#include <cmath>

#include "ucp/conformal.hpp"

using namespace ucp;

namespace {

BoundaryGraph flat_graph(double r0 = 1.0, double M0 = 2.0) {
  return {r0, M0, 1.0, UnivariateFunction::from_expression("0", -r0, r0)};
}

BoundaryGraph curved_graph() {
  return {1.0, 6.0, 1.0, UnivariateFunction::from_expression("0.05*x^2*cos(x)", -1.0, 1.0)};
}

ConformalOptions mesh(int n) {
  ConformalOptions o;
  o.flattening.nx = n;
  o.flattening.ny = n;
  return o;
}

PlateMaterial unit_material() {
  return PlateMaterial::analytic(AnalyticField::parse("1"), AnalyticField::parse("1"));
}

}  // namespace

TEST(Flattening, FlatGraphGivesLinearPotential) {
  const auto g = flat_graph(1.0, 2.0);
  const auto flat = solve_flattening_bvp(extend_boundary(g), {33, 33, {}});
  const Grid2D& grid = flat.k.grid();
  double e = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = flat.chart->to_physical(grid.x(i), grid.y(j));
      e = std::max(e, std::abs(flat.k.at(i, j) - x[1] / 4.0));
    }
  EXPECT_LE(e, 1e-10);
  EXPECT_LE(flat.trace_graph, 1e-12);
  EXPECT_LE(flat.trace_top, 1e-12);
}

TEST(Flattening, CurvedPotentialStaysInsideUnitInterval) {
  const BoundaryGraph g{1.0, 12.0, 1.0, UnivariateFunction::from_expression("0.1*sin(x)*x^2", -1.0, 1.0)};
  const auto flat = solve_flattening_bvp(extend_boundary(g), {65, 65, {}});
  EXPECT_GT(flat.interior_min, 0.0);
  EXPECT_LT(flat.interior_max, 1.0);
  EXPECT_LE(flat.trace_graph, 1e-12);
  EXPECT_LE(flat.trace_top, 1e-12);
}

TEST(Conjugate, FlatPotentialHasLinearConjugate) {
  const auto flat = solve_flattening_bvp(extend_boundary(flat_graph(1.0, 2.0)), {33, 33, {}});
  const auto conj = harmonic_conjugate(flat);
  const Grid2D& grid = flat.k.grid();
  double e = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 x = flat.chart->to_physical(grid.x(i), grid.y(j));
      e = std::max(e, std::abs(conj.h.at(i, j) - (x[0] + 2.0) / 4.0));
    }
  EXPECT_LE(e, 1e-10);
  EXPECT_LE(conj.loop_closure, 1e-8);
  EXPECT_LE(conj.lateral_variation, 1e-10);
  EXPECT_NEAR(conj.b - conj.a, 1.0, 1e-10);
  EXPECT_GT(conj.graph_min_step, 0.0);
}

TEST(Conjugate, TightToleranceReportsNonExactness) {
  const auto flat = solve_flattening_bvp(extend_boundary(curved_graph()), {33, 33, {}});
  try {
    harmonic_conjugate(flat, 1e-14);
    FAIL() << "expected a non-exactness error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonExactness);
  }
}

TEST(ConformalMap, FlatMapIsAffine) {
  const double r0 = 1.0;
  const auto map = build_conformal_map(flat_graph(r0, 2.0), mesh(33));
  const auto& c = map.certificate();
  EXPECT_TRUE(c.certified) << c.to_json().dump(2);
  EXPECT_LE(c.cauchy_riemann, 1e-8);
  EXPECT_LE(c.cauchy_riemann_closure, 1e-8);
  EXPECT_LE(c.origin_error, 1e-10);
  EXPECT_GT(c.K, 8.0);
  EXPECT_NEAR(c.c0, 0.25, 1e-10);
  EXPECT_NEAR(c.C0, 0.25, 1e-10);
  // Phi(y) = r0 y / (2 sqrt 2).
  const double m = r0 / (2.0 * std::sqrt(2.0));
  for (double y1 : {-1.0, -0.3, 0.0, 0.7, 1.0})
    for (double y2 : {0.0, 0.4, 1.0}) {
      const Vec2 x = map.forward({y1, y2});
      EXPECT_NEAR(x[0], m * y1, 1e-10);
      EXPECT_NEAR(x[1], m * y2, 1e-10);
      const Mat2 D = map.differential({y1, y2});
      EXPECT_NEAR(D[0], m, 1e-9);
      EXPECT_NEAR(D[3], m, 1e-9);
      EXPECT_NEAR(D[1], 0.0, 1e-9);
      EXPECT_NEAR(D[2], 0.0, 1e-9);
    }
}

TEST(ConformalMap, CurvedMapCertifiesAndConverges) {
  std::vector<double> cr;
  for (int n : {65, 129, 257}) {
    const auto map = build_conformal_map(curved_graph(), mesh(n));
    const auto& c = map.certificate();
    EXPECT_TRUE(c.certified) << c.to_json().dump(2);
    EXPECT_GE(c.b - c.a, 4.0 * c.c0 * (1.0 - 1e-6));
    EXPECT_LE(c.b - c.a, 4.0 * c.C0 * (1.0 + 1e-6));
    EXPECT_LE(c.boundary_offset, 1e-12);
    EXPECT_LE(c.round_trip, 1e-8);
    EXPECT_LE(c.origin_error, 1e-10);
    cr.push_back(c.cauchy_riemann);
  }
  EXPECT_GE(std::log2(cr[0] / cr[1]), 1.8);
  EXPECT_GE(std::log2(cr[1] / cr[2]), 1.8);
}

TEST(ConformalMap, BoundarySegmentMapsOntoGraph) {
  const auto map = build_conformal_map(curved_graph(), mesh(65));
  const auto g = curved_graph().g;
  double last = -1e9;
  for (int i = 0; i <= 40; ++i) {
    const double y1 = -1.0 + 0.05 * i;
    const Vec2 x = map.forward({y1, 0.0});
    EXPECT_NEAR(x[1], g(x[0]), 1e-12);
    EXPECT_GT(x[0], last);
    last = x[0];
  }
}

TEST(ConformalMap, DifferentialMatchesGradientOfPotential) {
  // |D Psi| = sqrt2 |grad k|, hence |D Phi^-1| = 2 |grad k| (2 sqrt2 / c0) / sqrt2.
  const auto map = build_conformal_map(curved_graph(), mesh(65));
  for (Vec2 y : {Vec2{0.2, 0.3}, Vec2{-0.5, 0.8}, Vec2{0.9, 0.1}}) {
    const Vec2 x = map.forward(y);
    const Mat2 Di = map.inverse_differential(x);
    const Mat2 D = map.differential(y);
    const double p00 = D[0] * Di[0] + D[1] * Di[2], p01 = D[0] * Di[1] + D[1] * Di[3];
    EXPECT_NEAR(p00, 1.0, 1e-10);
    EXPECT_NEAR(p01, 0.0, 1e-10);
    EXPECT_NEAR(D[0], D[3], 1e-12);
    EXPECT_NEAR(D[1], -D[2], 1e-12);
  }
}

TEST(ConformalMap, InverseOutsideDomainIsEmpty) {
  const auto map = build_conformal_map(flat_graph(), mesh(33));
  EXPECT_FALSE(map.inverse({0.0, -1.0}).has_value());
  EXPECT_FALSE(map.inverse({5.0, 0.5}).has_value());
}

TEST(Pullback, ConstantMaterialOnFlatMapHasNoLowerOrderTerms) {
  const auto map = build_conformal_map(flat_graph(), mesh(33));
  const auto p = pullback_coefficients(map, unit_material(), Grid2D(-1, 1, 0, 1, 17, 17));
  EXPECT_LE(p.a_sup, 1e-8);
  EXPECT_LE(p.c_sup, 1e-8);
  EXPECT_NEAR(p.J.at(3, 4), 0.125, 1e-10);  // |grad phi|^2 = (r0 / (2 sqrt2))^2
}

TEST(Pullback, HarmonicFunctionStaysHarmonic) {
  const auto map = build_conformal_map(curved_graph(), mesh(129));
  const Grid2D vg(-0.8, 0.8, -0.1, 0.9, 321, 201);
  const auto v = AnalyticField::parse("x^2 - y^2 + 3*x*y").sample(vg);
  const Grid2D fg(-1, 1, 0, 1, 81, 41);
  const auto r = pullback(v, map, unit_material(), fg);
  const auto lap = r.u.derivative(2, 0) + r.u.derivative(0, 2);
  const auto uxx = r.u.derivative(2, 0);
  double e = 0.0;
  for (int j = 2; j < fg.ny - 2; ++j)
    for (int i = 2; i < fg.nx - 2; ++i) e = std::max(e, std::abs(lap.at(i, j)));
  EXPECT_LE(e, 1e-3 * std::max(1.0, uxx.max_abs()));
}

TEST(Pullback, TransformedOperatorMatchesForcing) {
  // v = x1^4 + x1 x2^3 with unit moduli: lap^2 v = 24, so
  // lap^2 u - a.grad lap u - c_kl u_kl - c_k u_k = 24 J^2.
  const auto exact = AnalyticField::parse("x^4 + x*y^3");
  // Coarse probe grid: differences of order 4 must not resolve the map's spline cells.
  const Grid2D fg(-1, 1, 0, 1, 41, 21);
  std::vector<double> rel;
  for (int n : {65, 129}) {
    const auto map = build_conformal_map(curved_graph(), mesh(n));
    std::vector<double> u(fg.size());
    for (int j = 0; j < fg.ny; ++j)
      for (int i = 0; i < fg.nx; ++i) {
        const Vec2 x = map.forward({fg.x(i), fg.y(j)});
        u[fg.index(i, j)] = exact(x[0], x[1]);
      }
    const ScalarField U(fg, u);
    const auto p = pullback_coefficients(map, unit_material(), fg);
    const auto& c = p.coeffs;
    const auto bilap = U.derivative(4, 0) + 2.0 * U.derivative(2, 2) + U.derivative(0, 4);
    const auto glap1 = U.derivative(3, 0) + U.derivative(1, 2), glap2 = U.derivative(2, 1) + U.derivative(0, 3);
    const auto uxx = U.derivative(2, 0), uxy = U.derivative(1, 1), uyy = U.derivative(0, 2);
    const auto ux = U.derivative(1, 0), uy = U.derivative(0, 1);
    double e = 0.0, scale = 0.0;
    for (int j = 4; j < fg.ny - 4; ++j)
      for (int i = 4; i < fg.nx - 4; ++i) {
        const double lhs = bilap.at(i, j) - c.a1.at(i, j) * glap1.at(i, j) - c.a2.at(i, j) * glap2.at(i, j) -
                           c.c11.at(i, j) * uxx.at(i, j) - 2.0 * c.c12.at(i, j) * uxy.at(i, j) -
                           c.c22.at(i, j) * uyy.at(i, j) - c.c1.at(i, j) * ux.at(i, j) - c.c2.at(i, j) * uy.at(i, j);
        const double rhs = 24.0 * p.J.at(i, j) * p.J.at(i, j);
        e = std::max(e, std::abs(lhs - rhs));
        scale = std::max(scale, std::abs(rhs));
      }
    rel.push_back(e / scale);
  }
  EXPECT_LE(rel[1], 5e-3);
  EXPECT_LT(rel[1], rel[0]);
}

TEST(Pullback, ClampedFieldKeepsZeroTraces) {
  const auto map = build_conformal_map(curved_graph(), mesh(129));
  const Grid2D vg(-0.8, 0.8, -0.1, 0.9, 321, 201);
  const auto g = curved_graph().g;
  std::vector<double> vals(vg.size());
  for (int j = 0; j < vg.ny; ++j)
    for (int i = 0; i < vg.nx; ++i) {
      const double d = vg.y(j) - g(vg.x(i));
      vals[vg.index(i, j)] = d * d;
    }
  const auto r = pullback(ScalarField(vg, vals), map, unit_material(), Grid2D(-1, 1, 0, 1, 81, 41));
  EXPECT_LE(r.trace_u, 1e-8);
  EXPECT_LE(r.trace_uy, 1e-3);
  EXPECT_GT(r.coefficients.M1, 0.0);
  EXPECT_TRUE(std::isfinite(r.coefficients.M1));
}

TEST(Pullback, OutsideFieldDomainThrows) {
  const auto map = build_conformal_map(flat_graph(), mesh(33));
  const auto v = AnalyticField::parse("x").sample(Grid2D(-0.1, 0.1, 0.0, 0.1, 9, 9));
  try {
    pullback(v, map, unit_material(), Grid2D(-1, 1, 0, 1, 9, 9));
    FAIL() << "expected an extrapolation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Extrapolation);
  }
}
