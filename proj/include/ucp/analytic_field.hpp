#pragma once

#include <string>

#include "ucp/expression.hpp"
#include "ucp/scalar_field.hpp"
#include "ucp/taylor.hpp"

namespace ucp {

// Closed-form field u(x, y) with exact derivatives via Taylor jets.
class AnalyticField {
 public:
  static constexpr int kMaxOrder = 6;
  using Jet = Taylor2<kMaxOrder>;

  AnalyticField() = default;
  explicit AnalyticField(Expression e) : expr_(std::move(e)) {}
  static AnalyticField parse(const std::string& text, const std::map<std::string, double>& params = {}) {
    return AnalyticField(Expression::parse(text, {"x", "y"}, params));
  }

  const Expression& expression() const { return expr_; }
  const std::string& text() const { return expr_.text(); }

  double value(double x, double y) const { return expr_(x, y); }
  double operator()(double x, double y) const { return value(x, y); }
  Jet jet(double x, double y) const { return expr_(Jet::variable_x(x), Jet::variable_y(y)); }
  // d^px_x d^py_y u at (x, y); px + py <= kMaxOrder.
  double derivative(int px, int py, double x, double y) const;

  // Samples the (px, py) derivative at physical node positions.
  ScalarField sample(const Grid2D& grid, int px = 0, int py = 0,
                     std::shared_ptr<const Chart> chart = nullptr) const;

 private:
  Expression expr_;
};

}  // namespace ucp
