#pragma once

#include <functional>

#include "ucp/analytic_field.hpp"
#include "ucp/material.hpp"
#include "ucp/scalar_field.hpp"
#include "ucp/sparse_solve.hpp"

namespace ucp {

struct BoundaryValues {
  double v = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

// Dirichlet data (v, grad v) on the outer boundary, as a function of (x, y).
using BoundaryData = std::function<BoundaryValues(double, double)>;

BoundaryData boundary_from(const AnalyticField& v);
BoundaryData zero_boundary();

// Plate on a flat rectangle, clamped (v = v_y = 0) along y = y_min; v and
// its gradient prescribed on the other three sides. Normal derivatives enter
// through mirrored ghost nodes, so the centered discrete v_y vanishes exactly
// on the clamped side.
struct PlateProblem {
  Grid2D grid;
  PlateMaterial material;
  std::function<double(double, double)> forcing;  // empty means zero
  BoundaryData outer;                             // empty means zero
};

struct PlateSolveReport {
  LinearSolveReport linear;
  double clamped_value = 0.0;      // max |v| on the clamped side
  double clamped_normal_fd = 0.0;  // max |v_y| there from one-sided 4th-order differences
};

struct PlateSolution {
  ScalarField v;
  PlateSolveReport report;
};

// Divergence form: div div(D grad^2 v + N lap v I) = f, assembled as nested
// second differences (symmetric positive definite after ghost elimination).
PlateSolution solve_plate(const PlateProblem& problem, const SolverOptions& options = {});

// lap^2 u - a.grad lap u - sum_kl c_kl u_kl - sum_k c_k u_k = f; empty fields are zero.
struct NondivCoefficients {
  ScalarField a1, a2;
  ScalarField c11, c12, c22;  // c21 = c12
  ScalarField c1, c2;
};

struct NondivProblem {
  Grid2D grid;
  NondivCoefficients coeffs;
  std::function<double(double, double)> forcing;
  BoundaryData outer;
};

PlateSolution solve_nondiv(const NondivProblem& problem, const SolverOptions& options = {});

// Non-divergence coefficients of a material (a = a~, c_kl = q_kl) sampled on grid.
NondivCoefficients plate_coefficients(const PlateMaterial& material, const Grid2D& grid);

// L(v) from high-order differences of the moment fields.
ScalarField apply_divergence_operator(const ScalarField& v, const PlateMaterial& material);

struct ResidualField {
  ScalarField residual;  // zero inside the excluded margin
  int margin = 0;        // nodes within this distance of an edge are excluded
  bool shrunk = false;
  double interior_max = 0.0;
};

// lap^2 v - a~.grad lap v - q~2(v) - f/B on the grid nodes of v.
ResidualField residual_nondiv(const ScalarField& v, const PlateMaterial& material,
                              const std::function<double(double, double)>& forcing = {}, int margin = 3);

}  // namespace ucp
