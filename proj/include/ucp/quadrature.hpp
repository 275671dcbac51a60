#pragma once

#include <functional>
#include <vector>

#include "ucp/analytic_field.hpp"
#include "ucp/scalar_field.hpp"

namespace ucp {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points (cached, thread-safe).
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre on [a, b].
double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels,
                        int order = 10);

// Adaptive bisection with 10-point Gauss-Legendre, converged when the
// two-half estimate agrees with the whole to max(abs_tol, rel_tol*|I|).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13, double abs_tol = 1e-300, int max_depth = 48);

enum class RegionKind { HalfDisc, Disc, DomainDisc };

// Integration region intersected with the disc B_s centered at the origin.
struct Region {
  RegionKind kind = RegionKind::HalfDisc;
  // For DomainDisc: the domain is {x2 > boundary(x1)}.
  std::function<double(double)> boundary;

  static Region half_disc() { return {RegionKind::HalfDisc, {}}; }
  static Region disc() { return {RegionKind::Disc, {}}; }
  static Region domain_disc(std::function<double(double)> g) {
    return {RegionKind::DomainDisc, std::move(g)};
  }
};

struct PolarOptions {
  double panel = 0.0;  // target panel length; 0 selects a default
  int order = 6;       // Gauss points per panel and direction
};

using PointFunction = std::function<double(double, double)>;

// Angular limits of the region at radius r.
std::pair<double, double> angular_range(const Region& region, double r);

// Integral of f over the region intersected with the annulus s_in <= |x| <= s_out.
double integrate_region(const PointFunction& f, double s_in, double s_out, const Region& region,
                        const PolarOptions& options);

// sigma_s = integral of u^2 over the region intersected with B_s.
double region_norm(const ScalarField& u, double s, const Region& region = Region::half_disc(),
                   PolarOptions options = {});
double region_norm(const AnalyticField& u, double s, const Region& region = Region::half_disc(),
                   PolarOptions options = {});
double region_norm(const PointFunction& u, double s, const Region& region, const PolarOptions& options);

// Cumulative profile over increasing radii: nondecreasing by construction.
std::vector<double> region_norm_profile(const PointFunction& u, const std::vector<double>& radii,
                                        const Region& region, const PolarOptions& options);
std::vector<double> region_norm_profile(const ScalarField& u, const std::vector<double>& radii,
                                        const Region& region = Region::half_disc(),
                                        PolarOptions options = {});

// Throws OutOfRange when B_s (or its upper half) leaves the field's grid box.
void check_region_extent(const ScalarField& u, double s, const Region& region);

}  // namespace ucp
