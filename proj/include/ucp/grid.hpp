#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "ucp/error.hpp"

namespace ucp {

// Uniform tensor grid; node (i, j) sits at (x_min + i*hx, y_min + j*hy).
struct Grid2D {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int nx = 257;
  int ny = 129;

  Grid2D() = default;
  Grid2D(double x0, double x1, double y0, double y1, int nx_, int ny_)
      : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
    if (nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0))
      throw Error(ErrorKind::InvalidInput, "degenerate grid");
  }

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return y_min + j * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  bool contains(double x, double y, double slack = 1e-12) const {
    const double sx = slack * (x_max - x_min), sy = slack * (y_max - y_min);
    return x >= x_min - sx && x <= x_max + sx && y >= y_min - sy && y <= y_max + sy;
  }
  bool operator==(const Grid2D&) const = default;
};

using Vec2 = std::array<double, 2>;
// Row-major 2x2 matrix: {m00, m01, m10, m11}.
using Mat2 = std::array<double, 4>;

// Maps computational coordinates (grid space) to physical coordinates.
class Chart {
 public:
  virtual ~Chart() = default;
  virtual Vec2 to_physical(double s, double t) const = 0;
  // Empty when (x, y) lies outside the chart image.
  virtual std::optional<Vec2> to_computational(double x, double y) const = 0;
  // d(s,t)/d(x,y) at a computational point.
  virtual Mat2 inverse_jacobian(double s, double t) const = 0;
};

}  // namespace ucp
