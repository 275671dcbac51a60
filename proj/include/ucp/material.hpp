#pragma once

#include <array>
#include <memory>
#include <optional>

#include "ucp/analytic_field.hpp"
#include "ucp/scalar_field.hpp"

namespace ucp {

struct MaterialPoint {
  double E = 0.0;
  double nu = 0.0;
  double B = 0.0;
};

// Young modulus, Poisson ratio and bending stiffness from Lamé moduli.
MaterialPoint derive_point(double lambda, double mu, double thickness);

// Coefficients of L(v) = div div(D grad^2 v + N lap v I) = B (lap^2 v - a.grad lap v - q(v))
// with D = B(1 - nu), N = nu B, a = -2 grad B / B and
// q(v) = sum_ij q_ij v_ij, q_ij = -(d_ij D + delta_ij lap N)/B.
struct CoefficientSample {
  double lambda = 0.0, mu = 0.0;
  double E = 0.0, nu = 0.0, B = 0.0, D = 0.0, N = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;  // q21 = q12
};

struct ConvexityConstants {
  double alpha0 = 0.0;   // min mu
  double gamma0 = 0.0;   // min 2 mu + 3 lambda
  double Lambda0 = 0.0;  // max of the C^4 norms of lambda and mu
};

class PlateMaterial {
 public:
  static PlateMaterial analytic(AnalyticField lambda, AnalyticField mu, double thickness = 1.0);
  // Sampled moduli; derivatives come from finite differences on their grid.
  static PlateMaterial sampled(ScalarField lambda, ScalarField mu, double thickness = 1.0);

  double thickness() const { return thickness_; }
  bool is_constant() const { return constant_; }
  bool is_analytic() const { return analytic_; }
  std::string description() const;

  // Throws Extrapolation outside the sampled grid.
  CoefficientSample at(double x, double y) const;

  // Measured constants over the nodes of grid (C^4 norm = sum over |a| <= 4 of sup |D^a|).
  ConvexityConstants measure(const Grid2D& grid) const;

  // Throws InvalidMaterial naming the first node that violates convexity,
  // nu in (-1, 1/2], or declared constants.
  ConvexityConstants validate(const Grid2D& grid, const std::optional<ConvexityConstants>& declared = {}) const;

 private:
  struct SampledData;
  PlateMaterial() = default;

  double thickness_ = 1.0;
  bool analytic_ = true;
  bool constant_ = false;
  AnalyticField lambda_expr_, mu_expr_;
  std::shared_ptr<const SampledData> sampled_;
};

// Derived coefficient fields on a grid (physical node positions).
struct DerivedCoefficients {
  ScalarField E, nu, B, D, N;
  ScalarField a1, a2;
  std::array<std::array<ScalarField, 2>, 2> q2;  // q2[i][j], symmetric
  ConvexityConstants constants;
};

// Validates the material on grid, then samples all derived fields.
DerivedCoefficients derive_coefficients(const PlateMaterial& material, const Grid2D& grid,
                                        std::shared_ptr<const Chart> chart = nullptr);

}  // namespace ucp
