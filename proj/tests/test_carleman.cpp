#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ucp/analytic_field.hpp"
#include "ucp/carleman.hpp"
#include "ucp/plate.hpp"

using namespace ucp;

namespace {

const char* const kBumps[] = {
    "bump((sqrt(x^2+y^2)-0.2)/0.1)",
    "bump((sqrt(x^2+y^2)-0.1)/0.2)",
    "bump((sqrt(x^2+y^2)-0.3)/0.2)",
    "bump((sqrt(x^2+y^2)-0.15)/0.1)*(1+0.5*x)",
    "bump((sqrt(x^2+y^2)-0.4)/0.3)*(1+0.3*y)",
};

// Max ratio over tau = 3, 3.5, ..., 12 on the 513^2 grid of [-1, 1]^2.
const double kGoldenMax[] = {0.001629579802, 0.06913614373, 0.02600147224, 0.002825985482, 0.1540510548};

std::vector<double> tau_grid() {
  std::vector<double> t;
  for (int k = 0; k <= 18; ++k) t.push_back(3.0 + 0.5 * k);
  return t;
}

double max_ratio(const std::vector<CarlemanResult>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.ratio);
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidInput;
}

HardyFunction hardy(std::function<double(double)> f, std::function<double(double)> df,
                    std::vector<double> breaks = {}) {
  return {std::move(f), std::move(df), std::move(breaks)};
}

}  // namespace

TEST(Weight, HalfClosedFormMatchesQuadrature) {
  EXPECT_NEAR(weight_phi(1.0, 0.5), 0.25, 1e-15);
  EXPECT_EQ(weight_phi(0.0, 0.5), 0.0);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    worst = std::max(worst, std::abs(weight_phi_quadrature(s, 0.5) - s / std::pow(1.0 + std::sqrt(s), 2)));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Weight, GenericEpsilonMatchesAntiderivative) {
  // The integral equals log(1 + s^eps)/eps for every eps.
  for (double eps : {0.1, 0.3, 0.7, 0.9})
    for (double s : {1e-6, 0.01, 0.3, 1.0, 4.0})
      EXPECT_NEAR(weight_phi(s, eps), s * std::pow(1.0 + std::pow(s, eps), -1.0 / eps), 1e-13 * std::max(s, 1e-3))
          << eps << ' ' << s;
}

TEST(Weight, BoundsAndMonotonicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double eps : {0.25, 0.5, 0.75}) {
    for (int k = 0; k < 1000; ++k) {
      const double s = 1.0 - U(rng);
      const double p = weight_phi(s, eps);
      EXPECT_LE(std::exp(-1.0 / eps) * s, p);
      EXPECT_LE(p, s);
    }
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double p = weight_phi(i / 200.0, eps);
      EXPECT_GT(p, prev);
      prev = p;
    }
  }
}

TEST(Weight, RhoIsRadialWithBoundedSlope) {
  for (double t = 0.0; t < 6.28; t += 0.37) {
    EXPECT_EQ(weight_rho(0.6 * std::cos(t), 0.6 * std::sin(t), 0.5),
              weight_phi(std::hypot(0.6 * std::cos(t), 0.6 * std::sin(t)), 0.5));
  }
  const double d = 1e-6;
  for (double x = -0.9; x <= 0.9; x += 0.15)
    for (double y = -0.9; y <= 0.9; y += 0.15) {
      const double dy = (weight_rho(x, y + d, 0.5) - weight_rho(x, y - d, 0.5)) / (2 * d);
      EXPECT_LE(std::abs(dy), 1.0 + 1e-8);
    }
}

TEST(Weight, EpsilonOutsideUnitIntervalIsRejected) {
  for (double eps : {0.0, 1.0, -0.5, 1.5})
    EXPECT_EQ(kind_of([&] { weight_phi(0.5, eps); }), ErrorKind::InvalidParameter);
}

TEST(Cutoff, PlateauAndSupport) {
  const auto c = build_cutoff(0.1, 0.6);
  EXPECT_DOUBLE_EQ(c.eta(0.05), 1.0);
  EXPECT_DOUBLE_EQ(c.eta(0.3), 1.0);
  EXPECT_EQ(c.eta(0.025), 0.0);
  EXPECT_EQ(c.eta(0.4), 0.0);
  EXPECT_EQ(c.eta(0.01), 0.0);
  EXPECT_EQ(c.eta(0.9), 0.0);
  for (int i = 0; i <= 10000; ++i) {
    const double e = c.eta(i / 10000.0);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
  EXPECT_TRUE(std::isfinite(c.C));
}

TEST(Cutoff, DerivativeBoundsScale) {
  const auto a = build_cutoff(0.1, 0.6), b = build_cutoff(0.05, 0.3);
  for (int k = 0; k <= 4; ++k) {
    EXPECT_NEAR(b.inner_sup[k] / (a.inner_sup[k] * std::pow(2.0, k)), 1.0, 1e-2) << k;
    EXPECT_NEAR(b.outer_sup[k] / (a.outer_sup[k] * std::pow(2.0, k)), 1.0, 1e-2) << k;
  }
  EXPECT_NEAR(a.C, b.C, 1e-2 * a.C);
}

TEST(Cutoff, JetDerivativesMatchDifferences) {
  const auto c = build_cutoff(0.2, 0.8);
  const double h = 1e-5;
  for (double t : {0.06, 0.08, 0.45, 0.5}) {
    const auto d = c.eta_derivatives(t);
    EXPECT_NEAR(d[1], (c.eta(t + h) - c.eta(t - h)) / (2 * h), 1e-5 * std::max(1.0, std::abs(d[1])));
    const auto dp = c.eta_derivatives(t + h), dm = c.eta_derivatives(t - h);
    EXPECT_NEAR(d[4], (dp[3] - dm[3]) / (2 * h), 1e-4 * std::max(1.0, std::abs(d[4])));
  }
}

TEST(Cutoff, OrderingIsEnforced) {
  EXPECT_EQ(kind_of([] { build_cutoff(0.3, 0.5); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { build_cutoff(0.1, 1.0); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { build_cutoff(0.0, 0.5); }), ErrorKind::InvalidParameter);
}

TEST(Carleman, ZeroFieldGivesZero) {
  const auto r = carleman_ratio(ScalarField::zeros(Grid2D(-1, 1, -1, 1, 65, 65)), 5.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.ratio, 0.0);
  EXPECT_FALSE(r.violation_candidate);
}

TEST(Carleman, SupportMustAvoidOriginAndRim) {
  const Grid2D g(-1, 1, -1, 1, 129, 129);
  EXPECT_EQ(kind_of([&] { carleman_ratio(AnalyticField::parse("bump((x^2+y^2)/0.04)").sample(g), 5); }),
            ErrorKind::InvalidSupport);
  EXPECT_EQ(kind_of([&] { carleman_ratio(AnalyticField::parse("bump((sqrt(x^2+y^2)-0.8)/0.3)").sample(g), 5); }),
            ErrorKind::InvalidSupport);
  CarlemanOptions o;
  o.R_tilde0 = 0.4;
  EXPECT_EQ(kind_of([&] { carleman_ratio(AnalyticField::parse(kBumps[2]).sample(g), 5, o); }),
            ErrorKind::InvalidSupport);
}

TEST(Carleman, RatioIsScaleInvariant) {
  const Grid2D g(-1, 1, -1, 1, 129, 129);
  const auto U = AnalyticField::parse(kBumps[3]).sample(g);
  const auto a = carleman_ratio(U, 6.0), b = carleman_ratio(-3.0 * U, 6.0);
  EXPECT_NEAR(b.lhs, 9.0 * a.lhs, 1e-12 * b.lhs);
  EXPECT_NEAR(b.rhs, 9.0 * a.rhs, 1e-12 * b.rhs);
  EXPECT_NEAR(b.ratio, a.ratio, 1e-12 * a.ratio);
}

TEST(Carleman, GoldenSweepMaxima) {
  const Grid2D g(-1, 1, -1, 1, 513, 513), fine(-1, 1, -1, 1, 1025, 1025);
  for (int b = 0; b < 5; ++b) {
    const auto rows = carleman_sweep(AnalyticField::parse(kBumps[b]).sample(g), tau_grid());
    for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.ratio) && r.ratio > 0.0);
    EXPECT_NEAR(max_ratio(rows), kGoldenMax[b], 0.05 * kGoldenMax[b]) << kBumps[b];
    const auto refined = carleman_sweep(AnalyticField::parse(kBumps[b]).sample(fine), tau_grid());
    EXPECT_LE(max_ratio(refined), 10.0 * kGoldenMax[b]);
  }
}

TEST(Carleman, SweepCsvHasOneRowPerTau) {
  const auto rows = carleman_sweep(AnalyticField::parse(kBumps[0]).sample(Grid2D(-1, 1, -1, 1, 129, 129)),
                                   {3, 4, 5});
  const auto csv = sweep_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("tau,lhs,rhs,ratio\n", 0), 0u);
}

TEST(Hardy, ClosedForms) {
  const auto r = hardy_ratio(hardy([](double t) { return std::min(t, 1.0); },
                                   [](double t) { return t < 1.0 ? 1.0 : 0.0; }, {1.0}));
  EXPECT_NEAR(r.numerator, 2.0 - 1e-3, 1e-10);
  EXPECT_NEAR(r.denominator, 4.0, 1e-10);
  EXPECT_EQ(hardy_ratio(hardy([](double) { return 0.0; }, [](double) { return 0.0; })).ratio, 0.0);
  EXPECT_EQ(kind_of([] { hardy_ratio(hardy([](double t) { return 1.0 + t; }, [](double) { return 1.0; })); }),
            ErrorKind::Precondition);
}

TEST(Hardy, ExtremalFamilyApproachesOne) {
  double prev = 0.0;
  for (double d : {0.1, 0.05, 0.02, 0.01}) {
    const auto r = hardy_ratio(hardy([d](double t) { return t < 1.0 ? std::pow(t, 0.5 + d) : 1.0; },
                                     [d](double t) { return t < 1.0 ? (0.5 + d) * std::pow(t, d - 0.5) : 0.0; },
                                     {1.0}));
    // With the tail on [1, T]: (1 + 2d(1 - 1/T)) / (1 + 2d)^2.
    EXPECT_NEAR(r.ratio, (1.0 + 2.0 * d * (1.0 - 1e-3)) / std::pow(1.0 + 2.0 * d, 2), 1e-6);
    EXPECT_GT(r.ratio, prev);
    EXPECT_LT(r.ratio, 1.0);
    prev = r.ratio;
  }
  EXPECT_NEAR(prev, 1.02 / (4.0 * 0.51 * 0.51), 0.02 * 0.9804);
}

TEST(Hardy, BatteryStaysBelowOne) {
  const auto battery = hardy_battery();
  ASSERT_EQ(battery.size(), 20u);
  for (std::size_t k = 0; k < battery.size(); ++k) {
    const auto r = hardy_ratio(battery[k]);
    EXPECT_GT(r.ratio, 0.0) << k;
    EXPECT_LE(r.ratio, 1.0 + 1e-3) << k;
  }
}

TEST(Interpolation, QuadraticClosedForm) {
  // y^2 on B_1+: |Dv|^2 = pi/2 and |v|^2 = pi/16, so the worst eps is 1 and the constant is sqrt(8).
  const Grid2D g(-1, 1, 0, 1, 129, 65);
  EXPECT_NEAR(interpolation_check(AnalyticField::parse("y^2").sample(g), 1.0, 4, 1), std::sqrt(8.0), 1e-6);
  EXPECT_EQ(interpolation_check(ScalarField::zeros(g), 1.0, 4, 1), 0.0);
  EXPECT_EQ(kind_of([&] { interpolation_check(ScalarField::zeros(g), 1.0, 2, 2); }), ErrorKind::InvalidParameter);
}

TEST(Interpolation, RandomFieldsAreStableUnderRefinement) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int f = 0; f < 10; ++f) {
    double a[4], kx[4], ky[4], ph[4];
    for (int k = 0; k < 4; ++k) {
      a[k] = U(rng);
      kx[k] = 4.0 * U(rng);
      ky[k] = 4.0 * U(rng);
      ph[k] = 3.0 * U(rng);
    }
    const auto v = [&](double x, double y) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[k] * std::cos(kx[k] * x + ky[k] * y + ph[k]);
      return s;
    };
    const double c1 = interpolation_check(ScalarField::sample(Grid2D(-1, 1, 0, 1, 65, 33), v), 1.0, 4, 2);
    const double c2 = interpolation_check(ScalarField::sample(Grid2D(-1, 1, 0, 1, 129, 65), v), 1.0, 4, 2);
    EXPECT_GT(c1, 0.0);
    EXPECT_LE(std::max(c1, c2) / std::min(c1, c2), 2.0) << f;
  }
}

TEST(Caccioppoli, QuadraticClosedForm) {
  // y^2: |Du|^2 on B_r/2+ = pi r^4/32 and |u|^2 on B_r+ = pi r^6/16, so C1 = 1/sqrt(2), C2 = sqrt(8).
  const Grid2D g(-1, 1, 0, 1, 129, 65);
  const auto c = caccioppoli_check(AnalyticField::parse("y^2").sample(g), 1.0);
  ASSERT_EQ(c.C.size(), 4u);
  EXPECT_NEAR(c.C[0], std::sqrt(0.5), 1e-6);
  EXPECT_NEAR(c.C[1], std::sqrt(8.0), 1e-6);
  EXPECT_NEAR(c.C[2], 0.0, 1e-6);
  EXPECT_EQ(kind_of([&] { caccioppoli_check(ScalarField::zeros(g), 1.0); }), ErrorKind::Degenerate);
}

TEST(Caccioppoli, HomogeneousSolutionIsScaleFree) {
  // x^2 y^2 - y^4/3 is biharmonic, clamped and homogeneous of degree 4.
  const auto mat = PlateMaterial::analytic(AnalyticField::parse("1"), AnalyticField::parse("1"));
  const PlateProblem p{Grid2D(-1, 1, 0, 1, 129, 65), mat, {},
                       boundary_from(AnalyticField::parse("x^2*y^2 - y^4/3"))};
  const auto u = solve_plate(p).v;
  std::vector<CaccioppoliResult> rs;
  for (double r : {0.2, 0.4, 0.8}) rs.push_back(caccioppoli_check(u, r));
  for (int h = 0; h < 4; ++h) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rs) {
      lo = std::min(lo, r.C[h]);
      hi = std::max(hi, r.C[h]);
    }
    EXPECT_LE(hi / lo, 1.05) << h + 1;
  }
}
