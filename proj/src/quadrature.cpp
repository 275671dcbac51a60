#include "ucp/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "ucp/error.hpp"

namespace ucp {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (n < 1) throw Error(ErrorKind::InvalidInput, "Gauss rule needs at least one point");
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (slot) return *slot;
  auto rule = std::make_unique<GaussRule>();
  rule->nodes.resize(static_cast<std::size_t>(n));
  rule->weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule->nodes[static_cast<std::size_t>(i)] = -x;
    rule->nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule->weights[static_cast<std::size_t>(i)] = w;
    rule->weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule->nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  slot = std::move(rule);
  return *slot;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * f(c + 0.5 * h * g.nodes[k]);
    sum += 0.5 * h * s;
  }
  return sum;
}

namespace {

double gauss10(const std::function<double(double)>& f, double a, double b) {
  return integrate_panels(f, a, b, 1, 10);
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double rel_tol,
             double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss10(f, a, m), right = gauss10(f, m, b);
  const double both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= std::max(abs_tol, rel_tol * std::abs(both))) return both;
  return adapt(f, a, m, left, rel_tol, 0.5 * abs_tol, depth - 1) +
         adapt(f, m, b, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, gauss10(f, a, b), rel_tol, abs_tol, max_depth);
}

std::pair<double, double> angular_range(const Region& region, double r) {
  switch (region.kind) {
    case RegionKind::HalfDisc: return {0.0, std::numbers::pi};
    case RegionKind::Disc: return {0.0, 2.0 * std::numbers::pi};
    case RegionKind::DomainDisc: break;
  }
  if (!region.boundary) throw Error(ErrorKind::InvalidInput, "domain region without boundary");
  const auto F = [&](double th) { return r * std::sin(th) - region.boundary(r * std::cos(th)); };
  // F increases through zero on the right half and decreases on the left.
  auto root = [&](double lo, double hi, bool increasing) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool positive = F(mid) > 0.0;
      if (positive == increasing) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  const double half_pi = 0.5 * std::numbers::pi;
  return {root(-half_pi, half_pi, true), root(half_pi, 3.0 * half_pi, false)};
}

double integrate_region(const PointFunction& f, double s_in, double s_out, const Region& region,
                        const PolarOptions& options) {
  if (!(s_out > s_in)) return 0.0;
  const GaussRule& g = gauss_legendre(options.order);
  const double panel = options.panel > 0.0 ? options.panel : s_out / 16.0;
  const int nr = std::max(1, static_cast<int>(std::ceil((s_out - s_in) / panel)));
  const double hr = (s_out - s_in) / nr;
  double total = 0.0;
  for (int pr = 0; pr < nr; ++pr) {
    const double rc = s_in + (pr + 0.5) * hr;
    for (std::size_t kr = 0; kr < g.nodes.size(); ++kr) {
      const double r = rc + 0.5 * hr * g.nodes[kr];
      const auto [th0, th1] = angular_range(region, r);
      const int nt = std::max(2, static_cast<int>(std::ceil(r * (th1 - th0) / panel)));
      const double ht = (th1 - th0) / nt;
      double ring = 0.0;
      for (int pt = 0; pt < nt; ++pt) {
        const double tc = th0 + (pt + 0.5) * ht;
        for (std::size_t kt = 0; kt < g.nodes.size(); ++kt) {
          const double th = tc + 0.5 * ht * g.nodes[kt];
          ring += g.weights[kt] * f(r * std::cos(th), r * std::sin(th));
        }
      }
      total += 0.5 * hr * g.weights[kr] * r * 0.5 * ht * ring;
    }
  }
  return total;
}

void check_region_extent(const ScalarField& u, double s, const Region& region) {
  if (!(s > 0.0)) throw Error(ErrorKind::OutOfRange, "radius must be positive");
  if (u.chart()) return;  // checked pointwise during evaluation
  const Grid2D& g = u.grid();
  const double tol = 1e-12;
  const bool x_ok = g.x_min <= -s + tol && g.x_max >= s - tol;
  const bool top_ok = g.y_max >= s - tol;
  bool bottom_ok = true;
  switch (region.kind) {
    case RegionKind::HalfDisc: bottom_ok = g.y_min <= tol; break;
    case RegionKind::Disc: bottom_ok = g.y_min <= -s + tol; break;
    case RegionKind::DomainDisc: bottom_ok = true; break;
  }
  if (!(x_ok && top_ok && bottom_ok))
    throw Error(ErrorKind::OutOfRange, "radius " + std::to_string(s) + " exceeds field extent");
}

namespace {

PointFunction squared(const ScalarField& u) {
  return [&u](double x, double y) {
    const auto v = u.evaluate(x, y);
    if (!v) {
      throw Error(ErrorKind::OutOfRange,
                  "quadrature point (" + std::to_string(x) + ", " + std::to_string(y) + ") outside field");
    }
    return (*v) * (*v);
  };
}

PolarOptions field_defaults(const ScalarField& u, PolarOptions o) {
  if (o.panel <= 0.0) {
    double h = std::min(u.grid().hx(), u.grid().hy());
    if (u.chart()) {
      const Mat2 m = u.chart()->inverse_jacobian(0.5 * (u.grid().x_min + u.grid().x_max), u.grid().y_min);
      const double stretch = std::max(std::hypot(m[0], m[1]), std::hypot(m[2], m[3]));
      if (stretch > 0.0) h /= stretch;
    }
    o.panel = 2.0 * h;
    o.order = std::max(o.order, 6);
  }
  return o;
}

}  // namespace

double region_norm(const PointFunction& u, double s, const Region& region, const PolarOptions& options) {
  return integrate_region(
      [&](double x, double y) {
        const double v = u(x, y);
        return v * v;
      },
      0.0, s, region, options);
}

double region_norm(const ScalarField& u, double s, const Region& region, PolarOptions options) {
  check_region_extent(u, s, region);
  return integrate_region(squared(u), 0.0, s, region, field_defaults(u, options));
}

double region_norm(const AnalyticField& u, double s, const Region& region, PolarOptions options) {
  if (!(s > 0.0)) throw Error(ErrorKind::OutOfRange, "radius must be positive");
  if (options.panel <= 0.0) {
    options.panel = s / 8.0;
    options.order = std::max(options.order, 12);
  }
  return integrate_region(
      [&](double x, double y) {
        const double v = u.value(x, y);
        return v * v;
      },
      0.0, s, region, options);
}

namespace {

std::vector<double> cumulative_profile(const PointFunction& integrand, const std::vector<double>& radii,
                                       const Region& region, const PolarOptions& options) {
  std::vector<double> out;
  out.reserve(radii.size());
  double acc = 0.0, prev = 0.0;
  for (double s : radii) {
    if (!(s > prev)) throw Error(ErrorKind::InvalidInput, "profile radii must be strictly increasing");
    acc += integrate_region(integrand, prev, s, region, options);
    out.push_back(acc);
    prev = s;
  }
  return out;
}

}  // namespace

std::vector<double> region_norm_profile(const PointFunction& u, const std::vector<double>& radii,
                                        const Region& region, const PolarOptions& options) {
  return cumulative_profile(
      [&](double x, double y) {
        const double v = u(x, y);
        return v * v;
      },
      radii, region, options);
}

std::vector<double> region_norm_profile(const ScalarField& u, const std::vector<double>& radii,
                                        const Region& region, PolarOptions options) {
  if (radii.empty()) return {};
  check_region_extent(u, radii.back(), region);
  return cumulative_profile(squared(u), radii, region, field_defaults(u, options));
}

}  // namespace ucp
