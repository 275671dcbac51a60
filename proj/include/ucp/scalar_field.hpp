#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ucp/grid.hpp"
#include "ucp/spline.hpp"

namespace ucp {

// Grid-sampled scalar function. Node coordinates are computational; when a
// chart is attached they map to physical points through it.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const Grid2D& grid, std::vector<double> values,
              std::shared_ptr<const Chart> chart = nullptr, int stencil_order = 4);

  static ScalarField zeros(const Grid2D& grid, std::shared_ptr<const Chart> chart = nullptr);
  // Samples f at physical node positions.
  static ScalarField sample(const Grid2D& grid, const std::function<double(double, double)>& f,
                            std::shared_ptr<const Chart> chart = nullptr);

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values();
  const std::shared_ptr<const Chart>& chart() const { return chart_; }
  int stencil_order() const { return order_; }
  ScalarField with_stencil_order(int q) const;

  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  void set(int i, int j, double v);
  Vec2 node_position(int i, int j) const;

  // Derivative in computational coordinates with one-sided stencils at edges.
  ScalarField derivative(int px, int py) const;
  ScalarField laplacian() const;

  // Spline interpolation in computational coordinates.
  double interpolate(double s, double t) const;
  SplineSample interpolate_with_gradient(double s, double t) const;
  double interpolate_derivative(double s, double t, int ps, int pt) const;
  // Physical-point evaluation; empty outside the field's domain.
  std::optional<double> evaluate(double x, double y) const;

  double max_abs() const;
  bool all_finite() const;

  ScalarField map(const std::function<double(double)>& f) const;
  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  // Pointwise product.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

 private:
  struct Cache {
    std::once_flag once;
    std::unique_ptr<Spline2D> spline;
  };
  const Spline2D& spline() const;
  void check_compatible(const ScalarField& o) const;

  Grid2D grid_{};
  std::vector<double> values_;
  std::shared_ptr<const Chart> chart_;
  int order_ = 4;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Physical first derivatives (d/dx, d/dy) through the field's chart.
std::pair<ScalarField, ScalarField> physical_gradient(const ScalarField& f);

}  // namespace ucp
