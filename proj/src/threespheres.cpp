#include "ucp/threespheres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ucp/error.hpp"
#include "ucp/quadrature.hpp"

namespace ucp {

nlohmann::json ThreeSpheresOptions::to_json() const {
  return {{"epsilon", epsilon}, {"exponent_grid", exponent_grid}, {"ceiling", ceiling}, {"tau_tilde", tau_tilde}};
}

nlohmann::json CurvedOptions::to_json() const { return {{"flat", flat.to_json()}, {"R0", R0}}; }

double theta_tilde(double r, double R, double R0) {
  return std::log(R0 / 2.0 / R) / std::log(R0 / 2.0 / (r / 4.0));
}

double optimal_tau(double sigma_r, double sigma_R0, double r, double R0, double epsilon) {
  if (!(sigma_r > 0.0)) throw Error(ErrorKind::Degenerate, "sigma_r = 0 makes the three-spheres bound vacuous");
  if (sigma_R0 < sigma_r) throw Error(ErrorKind::InvalidInput, "sigma_R0 must not be below sigma_r");
  if (!(r / 4.0 < R0 / 2.0)) throw Error(ErrorKind::InvalidParameter, "need r/4 < R0/2");
  return 0.5 * (std::log(sigma_R0 / sigma_r) / std::log(R0 / 2.0 / (r / 4.0)) - 2.0 - epsilon);
}

nlohmann::json FlatReport::to_json() const {
  nlohmann::json j{{"radii", {r, R, R0}},
                   {"epsilon", epsilon},
                   {"sigma", {sigma_r, sigma_R, sigma_R0}},
                   {"theta_tilde", theta_tilde},
                   {"case", case_i ? "i" : "ii"},
                   {"C_emp", C_emp},
                   {"C_exp", C_exp},
                   {"pass", pass}};
  j["tau_star"] = std::isfinite(tau_star) ? nlohmann::json(tau_star) : nlohmann::json(nullptr);
  return j;
}

FlatReport three_spheres_from_sigma(double sigma_r, double sigma_R, double sigma_R0, double r, double R, double R0,
                                    const ThreeSpheresOptions& o) {
  if (!(0.0 < r && r < R && R < R0 / 2.0 && R0 < 1.0))
    throw Error(ErrorKind::InvalidParameter, "radii need 0 < r < R < R0/2 < R0 < 1");
  if (o.exponent_grid.empty()) throw Error(ErrorKind::InvalidParameter, "empty exponent grid");
  FlatReport f;
  f.r = r;
  f.R = R;
  f.R0 = R0;
  f.epsilon = o.epsilon;
  f.sigma_r = sigma_r;
  f.sigma_R = sigma_R;
  f.sigma_R0 = sigma_R0;
  f.theta_tilde = theta_tilde(r, R, R0);
  f.tau_star = sigma_r > 0.0 && sigma_R0 >= sigma_r ? optimal_tau(sigma_r, sigma_R0, r, R0, o.epsilon)
                                                     : std::numeric_limits<double>::quiet_NaN();
  f.case_i = f.tau_star >= o.tau_tilde;
  const double lhs = std::pow(R, 2.0 * o.epsilon) * sigma_R;
  const double interp = std::pow(sigma_r, f.theta_tilde) * std::pow(sigma_R0, 1.0 - f.theta_tilde);
  f.C_emp = INFINITY;
  for (double e : o.exponent_grid) {
    double c = 0.0;
    if (lhs > 0.0) c = interp > 0.0 ? lhs / (std::pow(R0 / (2.0 * R), e) * interp) : INFINITY;
    if (c < f.C_emp) {
      f.C_emp = c;
      f.C_exp = e;
    }
  }
  f.pass = f.C_emp <= o.ceiling;
  return f;
}

FlatReport three_spheres_flat(const ScalarField& u, double r, double R, double R0, const ThreeSpheresOptions& o) {
  if (!(0.0 < r && r < R && R < R0 / 2.0 && R0 < 1.0))
    throw Error(ErrorKind::InvalidParameter, "radii need 0 < r < R < R0/2 < R0 < 1");
  const auto s = region_norm_profile(u, {r, R, R0});
  return three_spheres_from_sigma(s[0], s[1], s[2], r, R, R0, o);
}

nlohmann::json CurvedReport::to_json() const {
  return {{"radii", {r1, r2, r0}}, {"K", K},           {"c", c},
          {"theta", theta},        {"flat", flat.to_json()}, {"pullback_trace", pullback_trace},
          {"pass", pass}};
}

CurvedReport three_spheres_curved(const ScalarField& v, const ConformalMap& map, const PlateMaterial& material,
                                  double r1, double r2, const Grid2D& flat_grid, const CurvedOptions& o) {
  if (!map.certified()) throw Error(ErrorKind::Precondition, "conformal map is not certified");
  const auto& cert = map.certificate();
  CurvedReport c;
  c.r1 = r1;
  c.r2 = r2;
  c.r0 = cert.r0;
  c.K = cert.K;
  c.c = o.R0 / (2.0 * cert.K);
  if (!(0.0 < r1 && r1 < r2 && r2 < c.c * c.r0))
    throw Error(ErrorKind::OutOfRange, "need r1 < r2 < c r0 with c = " + std::to_string(c.c));
  c.theta = std::log(o.R0 * c.r0 / (2.0 * c.K * r2)) / std::log(c.r0 / r1);
  const auto pb = pullback(v, map, material, flat_grid);
  c.pullback_trace = std::max(pb.trace_u, pb.trace_uy);
  c.flat = three_spheres_flat(pb.u, 2.0 * r1 / c.r0, c.K * r2 / c.r0, o.R0, o.flat);
  c.pass = c.flat.pass && c.flat.theta_tilde >= c.theta;
  return c;
}

nlohmann::json SucpReport::to_json() const {
  return {{"A", A},        {"exponent", exponent}, {"bound", bound},
          {"log_bound", log_bound}, {"sigma_r1", sigma_r1}, {"pass", pass}};
}

SucpReport sucp_lower_bound(const SucpInput& in) {
  if (!(in.sigma_r0 > 0.0)) throw Error(ErrorKind::NotApplicable, "zero norm on B_r0");
  if (!(in.C > 1.0 && in.c > 0.0 && in.c < 1.0))
    throw Error(ErrorKind::InvalidParameter, "need C > 1 and 0 < c < 1");
  if (!(0.0 < in.r1 && in.r1 < in.r2 && in.r2 < in.c * in.r0))
    throw Error(ErrorKind::InvalidParameter, "need r1 < r2 < c r0");
  SucpReport s;
  s.A = std::pow(in.r2 / in.r0, in.C) * in.sigma_r2 / (in.C * in.sigma_r0);
  if (!(s.A < 1.0)) throw Error(ErrorKind::Certification, "A = " + std::to_string(s.A) + " is not below 1");
  s.sigma_r1 = in.sigma_r1;
  // Compared in logs: the bound underflows for fast-vanishing data.
  const double log_A = -std::log(in.C) + in.C * std::log(in.r2 / in.r0) + std::log(in.sigma_r2) -
                       std::log(in.sigma_r0);
  s.exponent = log_A / std::log(in.r2 / (in.c * in.r0));
  s.log_bound = s.exponent * std::log(in.r1 / in.r0) + std::log(in.sigma_r0);
  s.bound = std::exp(s.log_bound);
  s.pass = std::log(in.sigma_r1) >= s.log_bound;
  return s;
}

double vanishing_order(const std::vector<double>& radii, const std::vector<double>& sigma, int count) {
  if (radii.size() != sigma.size()) throw Error(ErrorKind::InvalidInput, "radii and sigma differ in length");
  std::vector<std::size_t> idx(radii.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  std::vector<double> xs, ys;
  for (std::size_t k : idx) {
    if (static_cast<int>(xs.size()) == count) break;
    if (radii[k] > 0.0 && sigma[k] > 0.0) {
      xs.push_back(std::log(radii[k]));
      ys.push_back(std::log(sigma[k]));
    }
  }
  if (xs.size() < 2) throw Error(ErrorKind::Degenerate, "need two positive sigma values for a slope");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace ucp
