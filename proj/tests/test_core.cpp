#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ucp/analytic_field.hpp"
#include "ucp/expression.hpp"
#include "ucp/quadrature.hpp"
#include "ucp/scalar_field.hpp"
#include "ucp/stencil.hpp"
#include "ucp/taylor.hpp"

using namespace ucp;

TEST(Taylor, UnivariateDerivativesOfExpSin) {
  const auto x = Taylor1<6>::variable(0.3);
  const auto f = exp(x) * sin(x);
  // d/dx e^x sin x = e^x (sin x + cos x); second derivative 2 e^x cos x.
  EXPECT_NEAR(f.derivative(1), std::exp(0.3) * (std::sin(0.3) + std::cos(0.3)), 1e-14);
  EXPECT_NEAR(f.derivative(2), 2.0 * std::exp(0.3) * std::cos(0.3), 1e-13);
  EXPECT_NEAR(f.derivative(4), -4.0 * std::exp(0.3) * std::sin(0.3), 1e-12);
}

TEST(Taylor, BivariateMixedDerivative) {
  const auto x = Taylor2<4>::variable_x(0.5);
  const auto y = Taylor2<4>::variable_y(-0.2);
  const auto f = x * x * y * y * y + atan(x * y);
  const double xv = 0.5, yv = -0.2;
  // d^2/dxdy of x^2 y^3 is 6 x y^2; of atan(xy) is (1 - x^2 y^2)/(1 + x^2 y^2)^2.
  const double p = xv * yv;
  EXPECT_NEAR(f.derivative(1, 1), 6 * xv * yv * yv + (1 - p * p) / std::pow(1 + p * p, 2), 1e-13);
  auto g = [](double a, double b) {
    const double q = a * b;
    return (1 - q * q) / std::pow(1 + q * q, 2);
  };
  const double h = 1e-4;
  const double gxy = (g(xv + h, yv + h) - g(xv + h, yv - h) - g(xv - h, yv + h) + g(xv - h, yv - h)) / (4 * h * h);
  EXPECT_NEAR(f.derivative(2, 2), 12 * yv + gxy, 1e-6);
}

TEST(Taylor, TanhAndPowAgreeWithFiniteDifferences) {
  const double x0 = 0.7, h = 1e-4;
  const auto x = Taylor1<3>::variable(x0);
  const auto t = tanh(x) + pow(x, 1.5) + sqrt(x);
  auto f = [](double v) { return std::tanh(v) + std::pow(v, 1.5) + std::sqrt(v); };
  EXPECT_NEAR(t.derivative(1), (f(x0 + h) - f(x0 - h)) / (2 * h), 1e-7);
  EXPECT_NEAR(t.derivative(2), (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / (h * h), 1e-5);
}

TEST(Taylor, BridgeIsFlatAtEnds) {
  EXPECT_EQ(bridge(0.0), 0.0);
  EXPECT_EQ(bridge(1.0), 1.0);
  EXPECT_NEAR(bridge(0.5), 0.5, 1e-15);
  const auto j = bridge(Taylor1<4>::variable(1e-3));
  for (int k = 0; k <= 4; ++k) EXPECT_LT(std::abs(j.derivative(k)), 1e-100);
}

TEST(Expression, ParsesPrecedenceAndFunctions) {
  const auto e = Expression::parse("-x^2 + 2*y - sin(pi/2) + 2^3^2", {"x", "y"});
  EXPECT_DOUBLE_EQ(e(3.0, 1.0), -9.0 + 2.0 - 1.0 + 512.0);
  const auto g = Expression::parse("0.1*r0*sin(x1/r0)*(x1/r0)^2", {"x"}, {{"r0", 2.0}});
  EXPECT_NEAR(g(1.0), 0.1 * 2.0 * std::sin(0.5) * 0.25, 1e-15);
}

TEST(Expression, RejectsUnknownIdentifiers) {
  EXPECT_THROW(Expression::parse("z + 1", {"x", "y"}), Error);
  EXPECT_THROW(Expression::parse("foo(x)", {"x"}), Error);
  EXPECT_THROW(Expression::parse("(x + 1", {"x"}), Error);
}

TEST(Expression, ConstantDetection) {
  EXPECT_TRUE(Expression::parse("2*3 + 1", {"x"}).is_constant());
  EXPECT_DOUBLE_EQ(Expression::parse("2*3 + 1", {"x"}).constant_value(), 7.0);
  EXPECT_FALSE(Expression::parse("x", {"x"}).is_constant());
}

TEST(Stencil, CenteredWeightsMatchClassicalValues) {
  const auto w = fornberg_weights({-2, -1, 0, 1, 2}, 2);
  EXPECT_NEAR(w[0], -1.0 / 12, 1e-15);
  EXPECT_NEAR(w[1], 16.0 / 12, 1e-15);
  EXPECT_NEAR(w[2], -30.0 / 12, 1e-15);
  const StencilTable& t = stencil_table(9, 4, 4);
  EXPECT_EQ(t.at(4).numerator.size(), 7u);
  EXPECT_EQ(t.at(0).numerator.size(), 8u);
}

TEST(ScalarField, CubicDerivativesExactOnDyadicGrid) {
  const Grid2D g(-1, 1, 0, 1, 257, 129);
  const auto u = ScalarField::sample(g, [](double x, double y) { return y * y * y + x * y * y; });
  const auto uyy = u.derivative(0, 2);
  const auto uxyy = u.derivative(1, 2);
  const auto u4 = u.derivative(0, 4);
  double e1 = 0, e2 = 0, e3 = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      e1 = std::max(e1, std::abs(uyy.at(i, j) - (6 * g.y(j) + 2 * g.x(i))));
      e2 = std::max(e2, std::abs(uxyy.at(i, j) - 2.0));
      e3 = std::max(e3, std::abs(u4.at(i, j)));
    }
  EXPECT_LT(e1, 1e-12);
  EXPECT_LT(e2, 1e-10);
  EXPECT_LT(e3, 1e-6);
}

TEST(ScalarField, FourthOrderAccuracyOnSmoothData) {
  double err[2];
  int k = 0;
  for (int n : {65, 129}) {
    const Grid2D g(0, 1, 0, 1, n, n);
    const auto u = ScalarField::sample(g, [](double x, double y) { return std::sin(2 * x) * std::cos(y); });
    const auto d = u.derivative(2, 1);
    double e = 0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        e = std::max(e, std::abs(d.at(i, j) - 4 * std::sin(2 * g.x(i)) * std::sin(g.y(j))));
    err[k++] = e;
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 3.5);
}

TEST(ScalarField, SplineReproducesCubicsAndIsAccurate) {
  const Grid2D g(-1, 1, 0, 1, 33, 17);
  const auto u = ScalarField::sample(g, [](double x, double y) { return x * x * x - 2 * x * y * y + y; });
  for (double x : {-0.93, -0.1, 0.377, 0.99})
    for (double y : {0.01, 0.4, 0.97}) {
      EXPECT_NEAR(u.interpolate(x, y), x * x * x - 2 * x * y * y + y, 1e-13);
      const auto s = u.interpolate_with_gradient(x, y);
      EXPECT_NEAR(s.ds, 3 * x * x - 2 * y * y, 1e-12);
      EXPECT_NEAR(s.dt, -4 * x * y + 1, 1e-12);
    }
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const auto& r = gauss_legendre(7);
  double s = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], 12);
  EXPECT_NEAR(s, 2.0 / 13, 1e-15);
}

TEST(Quadrature, HalfDiscClosedForms) {
  const double s = 0.4;
  const auto one = AnalyticField::parse("1");
  EXPECT_NEAR(region_norm(one, s), std::numbers::pi * s * s / 2, 1e-14);
  const auto y2 = AnalyticField::parse("y^2");
  EXPECT_NEAR(region_norm(y2, s) / (std::numbers::pi * std::pow(s, 6) / 16), 1.0, 1e-13);
  const auto y3 = AnalyticField::parse("y^3");
  EXPECT_NEAR(region_norm(y3, s) / (5 * std::numbers::pi * std::pow(s, 8) / 128), 1.0, 1e-13);
  const Grid2D g(-1, 1, 0, 1, 257, 129);
  const auto field = ScalarField::sample(g, [](double, double y) { return y * y; });
  EXPECT_NEAR(region_norm(field, s) / (std::numbers::pi * std::pow(s, 6) / 16), 1.0, 1e-10);
  EXPECT_THROW(region_norm(field, 1.2), Error);
}

TEST(Quadrature, DomainDiscWithFlatBoundaryEqualsHalfDisc) {
  const auto y2 = AnalyticField::parse("y^2");
  const Region flat = Region::domain_disc([](double) { return 0.0; });
  EXPECT_NEAR(region_norm(y2, 0.3, flat), region_norm(y2, 0.3), 1e-14);
}

TEST(Quadrature, AdaptiveIntegration) {
  const double v = integrate_adaptive([](double t) { return 1.0 / (1.0 + t); }, 0.0, 1.0);
  EXPECT_NEAR(v, std::log(2.0), 1e-15);
}
