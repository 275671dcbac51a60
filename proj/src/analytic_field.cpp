#include "ucp/analytic_field.hpp"

namespace ucp {

namespace {

template <int N>
double jet_derivative(const Expression& e, int px, int py, double x, double y) {
  const auto j = e(Taylor2<N>::variable_x(x), Taylor2<N>::variable_y(y));
  return j.derivative(px, py);
}

double dispatch(const Expression& e, int px, int py, double x, double y) {
  const int order = px + py;
  if (order == 0) return e(x, y);
  if (order <= 2) return jet_derivative<2>(e, px, py, x, y);
  if (order <= 4) return jet_derivative<4>(e, px, py, x, y);
  return jet_derivative<AnalyticField::kMaxOrder>(e, px, py, x, y);
}

}  // namespace

double AnalyticField::derivative(int px, int py, double x, double y) const {
  if (px < 0 || py < 0 || px + py > kMaxOrder)
    throw Error(ErrorKind::InvalidInput, "analytic derivative order out of range");
  return dispatch(expr_, px, py, x, y);
}

ScalarField AnalyticField::sample(const Grid2D& grid, int px, int py,
                                  std::shared_ptr<const Chart> chart) const {
  if (px < 0 || py < 0 || px + py > kMaxOrder)
    throw Error(ErrorKind::InvalidInput, "analytic derivative order out of range");
  return ScalarField::sample(
      grid, [&](double x, double y) { return dispatch(expr_, px, py, x, y); }, std::move(chart));
}

}  // namespace ucp
