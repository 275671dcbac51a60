#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ucp {

constexpr int kGraphDerivatives = 7;
using Derivatives = std::array<double, kGraphDerivatives + 1>;

// Real function on [lo, hi] with derivatives 0..7.
class UnivariateFunction {
 public:
  using Impl = std::function<Derivatives(double)>;

  UnivariateFunction() = default;
  UnivariateFunction(Impl impl, double lo, double hi, std::string description, bool zero = false)
      : impl_(std::move(impl)), lo_(lo), hi_(hi), description_(std::move(description)), zero_(zero) {}

  static UnivariateFunction from_expression(const std::string& text, double lo, double hi,
                                            const std::map<std::string, double>& params = {});
  // Chebyshev interpolant through samples at the Lobatto nodes
  // x_j = c + r cos(pi j/(n-1)), j = 0..n-1, with c = (lo+hi)/2, r = (hi-lo)/2.
  static UnivariateFunction chebyshev(const std::vector<double>& samples, double lo, double hi);
  // Same, from (x, value) pairs that must sit on the Lobatto nodes.
  static UnivariateFunction chebyshev_from_points(const std::vector<std::pair<double, double>>& points,
                                                  double lo, double hi);

  double operator()(double x) const { return impl_(x)[0]; }
  double derivative(int k, double x) const { return impl_(x)[static_cast<std::size_t>(k)]; }
  Derivatives derivatives(double x) const { return impl_(x); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& description() const { return description_; }
  bool is_identically_zero() const { return zero_; }

 private:
  Impl impl_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::string description_;
  bool zero_ = false;
};

// Lobatto nodes on [lo, hi] in the order used by UnivariateFunction::chebyshev.
std::vector<double> chebyshev_lobatto_nodes(int n, double lo, double hi);

// (x, value) pairs from a two-column CSV file; a non-numeric first line is a header.
std::vector<std::pair<double, double>> read_samples_csv(const std::string& path);

struct HolderOptions {
  int samples = 2049;
  int dense_offsets = 16;  // all offsets up to this, then powers of two
};

// sum_{i<=k} scale^i sup|f^(i)| + scale^(k+alpha) |f^(k)|_alpha on [lo, hi].
double holder_norm(const UnivariateFunction& f, int k, double alpha, double scale, double lo, double hi,
                   const HolderOptions& options = {});

struct BoundaryGraph {
  double r0 = 1.0;
  double M0 = 1.0;
  double alpha = 1.0;
  UnivariateFunction g;
};

struct GraphValidation {
  double g0 = 0.0;
  double dg0 = 0.0;
  double norm = 0.0;  // C^{6,alpha} norm on [-r0, r0]
  bool ok = false;
};

// Throws InvalidInput when g(0), g'(0) or the C^{6,alpha} bound fail.
GraphValidation validate(const BoundaryGraph& graph);

struct ExtendedGraph {
  BoundaryGraph parent;
  UnivariateFunction gtilde;  // on [-2 r0, 2 r0]
  double norm_bound = 0.0;    // C^{6,alpha} norm of gtilde on [-2 r0, 2 r0], weights r0^i
  double empirical_constant = 0.0;  // norm_bound / (M0 r0)
  double max_abs = 0.0;
};

ExtendedGraph extend_boundary(const BoundaryGraph& graph);

}  // namespace ucp
