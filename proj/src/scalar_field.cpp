#include "ucp/scalar_field.hpp"

#include <cmath>

#include "ucp/error.hpp"
#include "ucp/stencil.hpp"

namespace ucp {

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> values,
                         std::shared_ptr<const Chart> chart, int stencil_order)
    : grid_(grid), values_(std::move(values)), chart_(std::move(chart)), order_(stencil_order) {
  if (values_.size() != grid_.size())
    throw Error(ErrorKind::InvalidInput, "field size does not match grid");
  if (order_ < 2) throw Error(ErrorKind::InvalidInput, "stencil order must be at least 2");
}

ScalarField ScalarField::zeros(const Grid2D& grid, std::shared_ptr<const Chart> chart) {
  return ScalarField(grid, std::vector<double>(grid.size(), 0.0), std::move(chart));
}

ScalarField ScalarField::sample(const Grid2D& grid, const std::function<double(double, double)>& f,
                                std::shared_ptr<const Chart> chart) {
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (chart) {
        const Vec2 p = chart->to_physical(grid.x(i), grid.y(j));
        v[grid.index(i, j)] = f(p[0], p[1]);
      } else {
        v[grid.index(i, j)] = f(grid.x(i), grid.y(j));
      }
    }
  }
  return ScalarField(grid, std::move(v), std::move(chart));
}

std::vector<double>& ScalarField::mutable_values() {
  cache_ = std::make_shared<Cache>();
  return values_;
}

ScalarField ScalarField::with_stencil_order(int q) const {
  ScalarField r = *this;
  if (q < 2) throw Error(ErrorKind::InvalidInput, "stencil order must be at least 2");
  r.order_ = q;
  return r;
}

void ScalarField::set(int i, int j, double v) {
  cache_ = std::make_shared<Cache>();
  values_[grid_.index(i, j)] = v;
}

Vec2 ScalarField::node_position(int i, int j) const {
  if (chart_) return chart_->to_physical(grid_.x(i), grid_.y(j));
  return {grid_.x(i), grid_.y(j)};
}

ScalarField ScalarField::derivative(int px, int py) const {
  if (px < 0 || py < 0) throw Error(ErrorKind::InvalidInput, "negative derivative order");
  const int nx = grid_.nx, ny = grid_.ny;
  std::vector<double> tmp(values_.size());
  if (px > 0) {
    const StencilTable& tx = stencil_table(nx, px, order_);
    for (int j = 0; j < ny; ++j)
      tx.apply(&values_[grid_.index(0, j)], 1, grid_.hx(), &tmp[grid_.index(0, j)], 1);
  } else {
    tmp = values_;
  }
  std::vector<double> out(values_.size());
  if (py > 0) {
    const StencilTable& ty = stencil_table(ny, py, order_);
    for (int i = 0; i < nx; ++i) ty.apply(&tmp[grid_.index(i, 0)], nx, grid_.hy(), &out[grid_.index(i, 0)], nx);
  } else {
    out = std::move(tmp);
  }
  return ScalarField(grid_, std::move(out), chart_, order_);
}

ScalarField ScalarField::laplacian() const { return derivative(2, 0) + derivative(0, 2); }

const Spline2D& ScalarField::spline() const {
  std::call_once(cache_->once, [&] { cache_->spline = std::make_unique<Spline2D>(grid_, values_); });
  return *cache_->spline;
}

double ScalarField::interpolate(double s, double t) const { return spline().value(s, t); }

SplineSample ScalarField::interpolate_with_gradient(double s, double t) const {
  return spline().sample(s, t);
}

double ScalarField::interpolate_derivative(double s, double t, int ps, int pt) const {
  return spline().derivative(s, t, ps, pt);
}

std::optional<double> ScalarField::evaluate(double x, double y) const {
  if (chart_) {
    const auto st = chart_->to_computational(x, y);
    if (!st || !grid_.contains((*st)[0], (*st)[1], 1e-9)) return std::nullopt;
    return interpolate((*st)[0], (*st)[1]);
  }
  if (!grid_.contains(x, y, 1e-12)) return std::nullopt;
  return interpolate(x, y);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField ScalarField::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(values_[k]);
  return ScalarField(grid_, std::move(v), chart_, order_);
}

void ScalarField::check_compatible(const ScalarField& o) const {
  if (!(grid_ == o.grid_)) throw Error(ErrorKind::InvalidInput, "field grids differ");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_compatible(o);
  cache_ = std::make_shared<Cache>();
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_compatible(o);
  cache_ = std::make_shared<Cache>();
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  cache_ = std::make_shared<Cache>();
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  a.check_compatible(b);
  std::vector<double> v(a.values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.values_[k] * b.values_[k];
  return ScalarField(a.grid_, std::move(v), a.chart_, a.order_);
}

std::pair<ScalarField, ScalarField> physical_gradient(const ScalarField& f) {
  ScalarField ds = f.derivative(1, 0);
  ScalarField dt = f.derivative(0, 1);
  if (!f.chart()) return {ds, dt};
  const Grid2D& g = f.grid();
  std::vector<double> dx(g.size()), dy(g.size());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Mat2 m = f.chart()->inverse_jacobian(g.x(i), g.y(j));  // rows: grad s, grad t
      const std::size_t k = g.index(i, j);
      const double fs = ds.values()[k], ft = dt.values()[k];
      dx[k] = fs * m[0] + ft * m[2];
      dy[k] = fs * m[1] + ft * m[3];
    }
  }
  return {ScalarField(g, std::move(dx), f.chart(), f.stencil_order()),
          ScalarField(g, std::move(dy), f.chart(), f.stencil_order())};
}

}  // namespace ucp
