#include "ucp/spline.hpp"

#include <algorithm>
#include <cmath>

namespace ucp {

void spline_second_derivatives(const double* f, std::ptrdiff_t stride, int n, double h, double* m,
                               std::ptrdiff_t m_stride) {
  auto F = [&](int i) { return f[i * stride]; };
  auto M = [&](int i) -> double& { return m[i * m_stride]; };
  const double scale = 6.0 / (h * h);
  if (n < 3) {
    for (int i = 0; i < n; ++i) M(i) = 0.0;
    return;
  }
  if (n == 3) {
    const double c = (F(0) - 2.0 * F(1) + F(2)) / (h * h);
    for (int i = 0; i < 3; ++i) M(i) = c;
    return;
  }
  // Not-a-knot ends eliminate M0 and M_{n-1}: rows 1 and n-2 reduce to 6 M = r.
  const int k = n - 2;
  std::vector<double> lower(static_cast<std::size_t>(k), 1.0), diag(static_cast<std::size_t>(k), 4.0),
      upper(static_cast<std::size_t>(k), 1.0), rhs(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    const int i = r + 1;
    rhs[static_cast<std::size_t>(r)] = F(i - 1) - 2.0 * F(i) + F(i + 1);
  }
  diag.front() = 6.0;
  upper.front() = 0.0;
  diag.back() = 6.0;
  lower.back() = 0.0;
  for (int r = 1; r < k; ++r) {
    const double w = lower[static_cast<std::size_t>(r)] / diag[static_cast<std::size_t>(r - 1)];
    diag[static_cast<std::size_t>(r)] -= w * upper[static_cast<std::size_t>(r - 1)];
    rhs[static_cast<std::size_t>(r)] -= w * rhs[static_cast<std::size_t>(r - 1)];
  }
  std::vector<double> sol(static_cast<std::size_t>(k));
  sol[static_cast<std::size_t>(k - 1)] = rhs[static_cast<std::size_t>(k - 1)] / diag[static_cast<std::size_t>(k - 1)];
  for (int r = k - 2; r >= 0; --r)
    sol[static_cast<std::size_t>(r)] =
        (rhs[static_cast<std::size_t>(r)] - upper[static_cast<std::size_t>(r)] * sol[static_cast<std::size_t>(r + 1)]) /
        diag[static_cast<std::size_t>(r)];
  for (int r = 0; r < k; ++r) M(r + 1) = scale * sol[static_cast<std::size_t>(r)];
  M(0) = 2.0 * M(1) - M(2);
  M(n - 1) = 2.0 * M(n - 2) - M(n - 3);
}

Spline2D::Spline2D(const Grid2D& grid, const std::vector<double>& values)
    : grid_(grid), f_(values), ms_(values.size()), mt_(values.size()), mst_(values.size()) {
  const int nx = grid.nx, ny = grid.ny;
  for (int j = 0; j < ny; ++j)
    spline_second_derivatives(&f_[grid.index(0, j)], 1, nx, grid.hx(), &ms_[grid.index(0, j)], 1);
  for (int i = 0; i < nx; ++i) {
    spline_second_derivatives(&f_[grid.index(i, 0)], nx, ny, grid.hy(), &mt_[grid.index(i, 0)], nx);
    spline_second_derivatives(&ms_[grid.index(i, 0)], nx, ny, grid.hy(), &mst_[grid.index(i, 0)], nx);
  }
}

namespace {

struct Basis {
  int cell;
  double w[4];  // weights for f_i, f_{i+1}, M_i, M_{i+1}
};

Basis basis(double x, double x0, double h, int n, int p) {
  Basis b{};
  int i = static_cast<int>(std::floor((x - x0) / h));
  i = std::clamp(i, 0, n - 2);
  b.cell = i;
  const double B = (x - (x0 + i * h)) / h;
  const double A = 1.0 - B;
  switch (p) {
    case 0:
      b.w[0] = A;
      b.w[1] = B;
      b.w[2] = (A * A * A - A) * h * h / 6.0;
      b.w[3] = (B * B * B - B) * h * h / 6.0;
      break;
    case 1:
      b.w[0] = -1.0 / h;
      b.w[1] = 1.0 / h;
      b.w[2] = -(3.0 * A * A - 1.0) * h / 6.0;
      b.w[3] = (3.0 * B * B - 1.0) * h / 6.0;
      break;
    case 2:
      b.w[0] = 0.0;
      b.w[1] = 0.0;
      b.w[2] = A;
      b.w[3] = B;
      break;
    default:
      // Third derivative of the cubic piece is piecewise constant.
      b.w[0] = 0.0;
      b.w[1] = 0.0;
      b.w[2] = -1.0 / h;
      b.w[3] = 1.0 / h;
      break;
  }
  return b;
}

}  // namespace

double Spline2D::eval(double s, double t, int ps, int pt) const {
  const Basis bs = basis(s, grid_.x_min, grid_.hx(), grid_.nx, ps);
  const Basis bt = basis(t, grid_.y_min, grid_.hy(), grid_.ny, pt);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    if (bs.w[a] == 0.0) continue;
    const int i = bs.cell + (a % 2);
    for (int b = 0; b < 4; ++b) {
      if (bt.w[b] == 0.0) continue;
      const int j = bt.cell + (b % 2);
      const std::size_t idx = grid_.index(i, j);
      const double coef = a < 2 ? (b < 2 ? f_[idx] : mt_[idx]) : (b < 2 ? ms_[idx] : mst_[idx]);
      acc += bs.w[a] * bt.w[b] * coef;
    }
  }
  return acc;
}

double Spline2D::value(double s, double t) const { return eval(s, t, 0, 0); }

SplineSample Spline2D::sample(double s, double t) const {
  return {eval(s, t, 0, 0), eval(s, t, 1, 0), eval(s, t, 0, 1)};
}

double Spline2D::derivative(double s, double t, int ps, int pt) const { return eval(s, t, ps, pt); }

}  // namespace ucp
