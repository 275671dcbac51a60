#include "ucp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "ucp/error.hpp"
#include "ucp/expression.hpp"
#include "ucp/taylor.hpp"

namespace ucp {

namespace {

using Jet = Taylor1<kGraphDerivatives>;

Derivatives to_derivatives(const Jet& j) {
  Derivatives d{};
  for (int k = 0; k <= kGraphDerivatives; ++k) d[static_cast<std::size_t>(k)] = j.derivative(k);
  return d;
}

}  // namespace

UnivariateFunction UnivariateFunction::from_expression(const std::string& text, double lo, double hi,
                                                       const std::map<std::string, double>& params) {
  auto expr = std::make_shared<Expression>(Expression::parse(text, {"x"}, params));
  const bool zero = expr->is_constant() && expr->constant_value() == 0.0;
  return UnivariateFunction(
      [expr](double x) { return to_derivatives((*expr)(Jet::variable(x))); }, lo, hi, text, zero);
}

std::vector<double> chebyshev_lobatto_nodes(int n, double lo, double hi) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = c + r * std::cos(std::numbers::pi * j / (n - 1));
  return x;
}

UnivariateFunction UnivariateFunction::chebyshev(const std::vector<double>& f, double lo, double hi) {
  const int n = static_cast<int>(f.size());
  if (n < 2) throw Error(ErrorKind::InvalidInput, "Chebyshev interpolation needs at least two samples");
  for (double v : f)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite boundary sample");
  const int m = n - 1;
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k <= m; ++k) {
    double s = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      s += w * f[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * j * k / m);
    }
    a[static_cast<std::size_t>(k)] = 2.0 * s / m;
  }
  a[0] *= 0.5;
  a[static_cast<std::size_t>(m)] *= 0.5;
  // Coefficients of successive derivatives in the reference variable.
  auto coeffs = std::make_shared<std::vector<std::vector<double>>>();
  coeffs->push_back(a);
  for (int d = 1; d <= kGraphDerivatives; ++d) {
    const auto& c = coeffs->back();
    std::vector<double> dc(c.size(), 0.0);
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
      const double next = (k + 1 < static_cast<int>(c.size())) ? dc[static_cast<std::size_t>(k + 1)] : 0.0;
      dc[static_cast<std::size_t>(k - 1)] = next + 2.0 * k * c[static_cast<std::size_t>(k)];
    }
    dc[0] *= 0.5;
    coeffs->push_back(std::move(dc));
  }
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  return UnivariateFunction(
      [coeffs, c, r](double x) {
        const double t = (x - c) / r;
        Derivatives d{};
        double scale = 1.0;
        for (int k = 0; k <= kGraphDerivatives; ++k) {
          const auto& cc = (*coeffs)[static_cast<std::size_t>(k)];
          double b1 = 0.0, b2 = 0.0;
          for (int i = static_cast<int>(cc.size()) - 1; i >= 1; --i) {
            const double b0 = 2.0 * t * b1 - b2 + cc[static_cast<std::size_t>(i)];
            b2 = b1;
            b1 = b0;
          }
          d[static_cast<std::size_t>(k)] = (t * b1 - b2 + cc[0]) * scale;
          scale /= r;
        }
        return d;
      },
      lo, hi, "chebyshev(" + std::to_string(n) + " samples)");
}

UnivariateFunction UnivariateFunction::chebyshev_from_points(
    const std::vector<std::pair<double, double>>& points, double lo, double hi) {
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const auto nodes = chebyshev_lobatto_nodes(static_cast<int>(sorted.size()), lo, hi);
  std::vector<double> values;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    if (std::abs(sorted[j].first - nodes[j]) > 1e-9 * (hi - lo))
      throw Error(ErrorKind::InvalidInput, "boundary samples are not on Chebyshev-Lobatto nodes (x = " +
                                               std::to_string(sorted[j].first) + ")");
    values.push_back(sorted[j].second);
  }
  return chebyshev(values, lo, hi);
}

std::vector<std::pair<double, double>> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open samples file " + path);
  std::vector<std::pair<double, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0, v = 0;
    if (!(ss >> x >> v)) {
      if (lineno == 1) continue;  // header
      throw Error(ErrorKind::InvalidInput, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    out.emplace_back(x, v);
  }
  return out;
}

double holder_norm(const UnivariateFunction& f, int k, double alpha, double scale, double lo, double hi,
                   const HolderOptions& options) {
  if (k < 0 || k > kGraphDerivatives - 1) throw Error(ErrorKind::InvalidInput, "Hoelder order out of range");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "Hoelder exponent must be in (0,1]");
  const int n = std::max(3, options.samples);
  const double dx = (hi - lo) / (n - 1);
  std::vector<double> sup(static_cast<std::size_t>(k + 1), 0.0);
  std::vector<double> top(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Derivatives d = f.derivatives(lo + i * dx);
    for (int j = 0; j <= k; ++j) {
      const double v = d[static_cast<std::size_t>(j)];
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite derivative sample");
      sup[static_cast<std::size_t>(j)] = std::max(sup[static_cast<std::size_t>(j)], std::abs(v));
    }
    top[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(k)];
  }
  double norm = 0.0;
  for (int j = 0; j <= k; ++j) norm += std::pow(scale, j) * sup[static_cast<std::size_t>(j)];
  std::vector<int> offsets;
  for (int d = 1; d <= std::min(options.dense_offsets, n - 1); ++d) offsets.push_back(d);
  for (int d = 2 * options.dense_offsets; d < n; d *= 2) offsets.push_back(d);
  if (offsets.back() != n - 1) offsets.push_back(n - 1);
  double semi = 0.0;
  for (int d : offsets) {
    const double denom = std::pow(d * dx, alpha);
    for (int i = 0; i + d < n; ++i)
      semi = std::max(semi, std::abs(top[static_cast<std::size_t>(i + d)] - top[static_cast<std::size_t>(i)]) / denom);
  }
  return norm + std::pow(scale, k + alpha) * semi;
}

GraphValidation validate(const BoundaryGraph& graph) {
  if (!(graph.r0 > 0.0) || !(graph.M0 > 0.0))
    throw Error(ErrorKind::InvalidInput, "r0 and M0 must be positive");
  if (!(graph.alpha > 0.0 && graph.alpha <= 1.0))
    throw Error(ErrorKind::InvalidInput, "alpha must lie in (0,1]");
  GraphValidation v;
  const Derivatives d0 = graph.g.derivatives(0.0);
  v.g0 = d0[0];
  v.dg0 = d0[1];
  v.norm = holder_norm(graph.g, 6, graph.alpha, graph.r0, -graph.r0, graph.r0);
  const double tol = 1e-12 * graph.M0 * graph.r0;
  if (std::abs(v.g0) > tol) throw Error(ErrorKind::InvalidInput, "g(0) != 0");
  if (std::abs(v.dg0) > 1e-12 * graph.M0) throw Error(ErrorKind::InvalidInput, "g'(0) != 0");
  if (v.norm > graph.M0 * graph.r0 * (1.0 + 1e-9))
    throw Error(ErrorKind::InvalidInput, "C^{6,alpha} norm " + std::to_string(v.norm) + " exceeds M0*r0 = " +
                                             std::to_string(graph.M0 * graph.r0));
  v.ok = true;
  return v;
}

ExtendedGraph extend_boundary(const BoundaryGraph& graph) {
  validate(graph);
  const double r0 = graph.r0;
  const UnivariateFunction g = graph.g;
  // Taylor data of order 6 at both junctions.
  const Derivatives right = g.derivatives(r0), left = g.derivatives(-r0);
  auto impl = [g, r0, right, left](double x) -> Derivatives {
    if (std::abs(x) <= r0) return g.derivatives(x);
    if (std::abs(x) >= 1.5 * r0) return Derivatives{};
    const double side = x > 0.0 ? 1.0 : -1.0;
    const Derivatives& d = x > 0.0 ? right : left;
    const Jet X = Jet::variable(x);
    const Jet D = X - side * r0;
    Jet p(d[6] / factorial(6));
    for (int j = 5; j >= 0; --j) p = p * D + d[static_cast<std::size_t>(j)] / factorial(j);
    const Jet chi = bridge((1.5 * r0 - side * X) / (0.5 * r0));
    return to_derivatives(chi * p);
  };
  ExtendedGraph e;
  e.parent = graph;
  e.gtilde = UnivariateFunction(impl, -2.0 * r0, 2.0 * r0, "extension of " + g.description(),
                                g.is_identically_zero());
  e.norm_bound = holder_norm(e.gtilde, 6, graph.alpha, r0, -2.0 * r0, 2.0 * r0);
  e.empirical_constant = e.norm_bound / (graph.M0 * r0);
  const int n = 4001;
  for (int i = 0; i < n; ++i) e.max_abs = std::max(e.max_abs, std::abs(e.gtilde(-2.0 * r0 + 4.0 * r0 * i / (n - 1))));
  if (e.max_abs > 2.0 * graph.M0 * r0)
    throw Error(ErrorKind::InvalidInput, "extended graph leaves the rectangle |x2| <= 2 M0 r0");
  return e;
}

}  // namespace ucp
