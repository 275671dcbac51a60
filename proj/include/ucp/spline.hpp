#pragma once

// Tensor-product not-a-knot cubic spline on a uniform grid. Reproduces cubic
// polynomials exactly and is C2, so finite differences of resampled data stay
// smooth across cell boundaries.

#include <vector>

#include "ucp/grid.hpp"

namespace ucp {

// Second derivatives of the not-a-knot cubic spline through n >= 4 uniform
// samples (stride-addressed), written to m.
void spline_second_derivatives(const double* f, std::ptrdiff_t stride, int n, double h, double* m,
                               std::ptrdiff_t m_stride);

struct SplineSample {
  double value = 0.0;
  double ds = 0.0;
  double dt = 0.0;
};

class Spline2D {
 public:
  Spline2D(const Grid2D& grid, const std::vector<double>& values);

  double value(double s, double t) const;
  SplineSample sample(double s, double t) const;
  // Derivative of order (ps, pt), each at most 2.
  double derivative(double s, double t, int ps, int pt) const;

 private:
  double eval(double s, double t, int ps, int pt) const;

  Grid2D grid_;
  std::vector<double> f_, ms_, mt_, mst_;
};

}  // namespace ucp
