#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucp/scalar_field.hpp"

namespace ucp {

// phi(s) = s exp(-int_0^s dt / (t^(1-eps) (1 + t^eps))), rho(x, y) = phi(|(x, y)|).
// Throws InvalidParameter unless 0 < epsilon < 1.
double weight_phi(double s, double epsilon);
double weight_rho(double x, double y, double epsilon);
// Always by adaptive quadrature in sigma = t^eps, for cross-checks.
double weight_phi_quadrature(double s, double epsilon);

struct CarlemanWeight {
  double epsilon = 0.5;
  double tau_bar = 3.0;   // lower end of the tau range
  double R_tilde0 = 1.0;  // supports must lie inside B_{R_tilde0}

  double phi(double s) const { return weight_phi(s, epsilon); }
  double rho(double x, double y) const { return weight_rho(x, y, epsilon); }
  nlohmann::json to_json() const;
};

// Radial cutoff: 0 on (0, r/4) and (2R0/3, 1), 1 on [r/2, R0/2].
struct Cutoff {
  double r = 0.0, R0 = 0.0;
  // Sampled sup |eta^(k)| on (r/4, r/2) and (R0/2, 2R0/3), k = 0..4.
  std::array<double, 5> inner_sup{}, outer_sup{};
  // max over k of inner_sup[k] r^k and outer_sup[k] R0^k.
  double C = 0.0;

  double eta(double t) const;
  std::array<double, 5> eta_derivatives(double t) const;
  double xi(double x, double y) const;
  nlohmann::json to_json() const;
};

// Throws InvalidParameter unless 0 < r < R0/2 < R0 < 1.
Cutoff build_cutoff(double r, double R0);

struct CarlemanOptions {
  double epsilon = 0.5;
  double R_tilde0 = 1.0;
  int margin = 4;  // support distance from the origin and the grid edge, in nodes
};

struct CarlemanResult {
  double tau = 0.0;
  std::array<double, 4> terms{};  // tau^(6-2k) int rho^(2k+eps-2-2tau) |D^k U|^2
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool violation_candidate = false;  // rhs = 0 while lhs > 0
};

// Node sums on a flat grid with Frobenius norms of the derivative tensors.
// Throws InvalidSupport when the support of U reaches the origin, the circle
// |x| = R_tilde0 or the grid edge.
CarlemanResult carleman_ratio(const ScalarField& U, double tau, const CarlemanOptions& options = {});
// Derivatives are taken once for the whole sweep.
std::vector<CarlemanResult> carleman_sweep(const ScalarField& U, const std::vector<double>& taus,
                                           const CarlemanOptions& options = {});
std::string sweep_csv(const std::vector<CarlemanResult>& rows);

struct HardyFunction {
  std::function<double(double)> f, df;
  std::vector<double> breakpoints;  // kinks of f, passed to the quadrature
};

struct HardyResult {
  double numerator = 0.0;    // int_0^T (f/t)^2
  double denominator = 0.0;  // 4 int_0^T f'^2
  double ratio = 0.0;
};

// Ratio on (0, T]. The first panel is mapped by t = b exp(-x) so integrable
// singularities at t = 0 are resolved. Throws Precondition when |f(0)| > 1e-12.
HardyResult hardy_ratio(const HardyFunction& f, double T = 1e3);

// Twenty smooth or piecewise-smooth f with f(0) = 0 and f, f' in L^2(0, 1e3).
std::vector<HardyFunction> hardy_battery();

// Logarithmic grid on [1e-3, 1] with 31 points.
std::vector<double> default_eps_grid();

// max over eps of r^j |D^j v| / (eps r^m |D^m v| + eps^(-j/(m-j)) |v|), norms
// on the upper half disc B_r+. Returns 0 when |v| = 0.
double interpolation_check(const ScalarField& v, double r, int m, int j,
                           const std::vector<double>& eps_grid = default_eps_grid());

// Frobenius L2 norm of the k-th derivative tensor on B_s+, squared.
double derivative_norm_sq(const ScalarField& v, int k, double s);

struct CaccioppoliResult {
  double r = 0.0;
  std::vector<double> C;  // C[h-1] = r^h |D^h u|_{B_r/2+} / |u|_{B_r+}
  nlohmann::json to_json() const;
};

// Throws Degenerate when |u|_{B_r+} = 0.
CaccioppoliResult caccioppoli_check(const ScalarField& u, double r, int max_order = 4);

}  // namespace ucp
