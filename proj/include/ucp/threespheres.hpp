#pragma once

#include <vector>

#include <json.hpp>

#include "ucp/conformal.hpp"
#include "ucp/material.hpp"
#include "ucp/scalar_field.hpp"

namespace ucp {

struct ThreeSpheresOptions {
  double epsilon = 0.5;
  std::vector<double> exponent_grid{0.0, 1.0, 2.0, 4.0, 8.0};
  double ceiling = 10.0;    // pass iff C_emp <= ceiling
  double tau_tilde = 3.0;   // case i) iff tau_star >= tau_tilde
  nlohmann::json to_json() const;
};

// log((R0/2)/R) / log((R0/2)/(r/4)).
double theta_tilde(double r, double R, double R0);

// tau with ((r/4)/R)^(-2-eps-2tau) sigma_r = ((R0/2)/R)^(-2-eps-2tau) sigma_R0.
// Throws Degenerate when sigma_r = 0 and InvalidInput when sigma_R0 < sigma_r.
double optimal_tau(double sigma_r, double sigma_R0, double r, double R0, double epsilon);

struct FlatReport {
  double r = 0.0, R = 0.0, R0 = 0.0, epsilon = 0.5;
  double sigma_r = 0.0, sigma_R = 0.0, sigma_R0 = 0.0;
  double theta_tilde = 0.0;
  double tau_star = 0.0;     // NaN when sigma_r = 0
  bool case_i = false;
  double C_emp = 0.0;        // min over the exponent grid
  double C_exp = 0.0;        // minimizing exponent
  bool pass = false;
  nlohmann::json to_json() const;
};

// From the three norms; the ordering r < R < R0/2 < R0 < 1 is enforced (InvalidParameter).
FlatReport three_spheres_from_sigma(double sigma_r, double sigma_R, double sigma_R0, double r, double R, double R0,
                                    const ThreeSpheresOptions& options = {});

// sigma_s = int over B_s+ of u^2, u on a flat grid containing B_R0+.
FlatReport three_spheres_flat(const ScalarField& u, double r, double R, double R0,
                              const ThreeSpheresOptions& options = {});

struct CurvedOptions {
  ThreeSpheresOptions flat{};
  double R0 = 0.8;  // flat outer radius, below 1
  nlohmann::json to_json() const;
};

struct CurvedReport {
  double r1 = 0.0, r2 = 0.0, r0 = 0.0;
  double K = 0.0, c = 0.0;  // c = R0 / (2K)
  double theta = 0.0;       // log(R0 r0 / (2K r2)) / log(r0 / r1)
  FlatReport flat;          // at r = 2 r1 / r0, R = K r2 / r0
  double pullback_trace = 0.0;  // max |u|, |u_y| on y = 0 after pullback
  bool pass = false;
  nlohmann::json to_json() const;
};

// Pulls v back through the map onto flat_grid and runs the flat verifier.
// Throws Precondition for an uncertified map and OutOfRange unless r1 < r2 < c r0.
CurvedReport three_spheres_curved(const ScalarField& v, const ConformalMap& map, const PlateMaterial& material,
                                  double r1, double r2, const Grid2D& flat_grid, const CurvedOptions& options = {});

struct SucpInput {
  double sigma_r1 = 0.0, sigma_r2 = 0.0, sigma_r0 = 0.0;
  double r1 = 0.0, r2 = 0.0, r0 = 0.0;
  double C = 2.0;  // > 1
  double c = 0.5;  // < 1, with r2 < c r0
};

struct SucpReport {
  double A = 0.0;         // (1/C)(r2/r0)^C sigma_r2 / sigma_r0
  double exponent = 0.0;  // log A / log(r2 / (c r0))
  double bound = 0.0;     // (r1/r0)^exponent sigma_r0
  double log_bound = 0.0;
  double sigma_r1 = 0.0;
  bool pass = false;      // sigma_r1 >= bound
  nlohmann::json to_json() const;
};

// sigma_r2 = 0 gives an infinite exponent and a zero bound.
// Throws NotApplicable when sigma_r0 = 0, InvalidParameter for C <= 1, c >= 1 or
// misordered radii, and Certification when A >= 1.
SucpReport sucp_lower_bound(const SucpInput& input);

// Least-squares slope of log sigma against log s over the `count` smallest radii.
// Throws Degenerate when fewer than two positive sigma values are available.
double vanishing_order(const std::vector<double>& radii, const std::vector<double>& sigma, int count = 10);

}  // namespace ucp
