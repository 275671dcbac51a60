#include "ucp/material.hpp"

#include <cmath>
#include <sstream>

#include "ucp/error.hpp"

namespace ucp {

namespace {

template <class T>
struct Stiffness {
  T E, nu, B, D, N;
};

template <class T>
Stiffness<T> stiffness(const T& lambda, const T& mu, double thickness) {
  const T E = mu * (2.0 * mu + 3.0 * lambda) / (mu + lambda);
  const T nu = lambda / (2.0 * (mu + lambda));
  const double h3 = thickness * thickness * thickness;
  const T B = h3 * E / (12.0 * (1.0 - nu * nu));
  return {E, nu, B, B * (1.0 - nu), nu * B};
}

std::string node_name(int i, int j, double x, double y) {
  std::ostringstream os;
  os << "node (" << i << ", " << j << ") at (" << x << ", " << y << ")";
  return os.str();
}

}  // namespace

MaterialPoint derive_point(double lambda, double mu, double thickness) {
  const auto s = stiffness(lambda, mu, thickness);
  return {s.E, s.nu, s.B};
}

struct PlateMaterial::SampledData {
  ScalarField lambda, mu;
  ScalarField E, nu, B, D, N, a1, a2, q11, q12, q22;
  double lambda_c4 = 0.0, mu_c4 = 0.0;
};

namespace {

double c4_norm(const ScalarField& f) {
  double total = 0.0;
  for (int order = 0; order <= 4; ++order)
    for (int px = 0; px <= order; ++px) total += f.derivative(px, order - px).max_abs();
  return total;
}

}  // namespace

PlateMaterial PlateMaterial::analytic(AnalyticField lambda, AnalyticField mu, double thickness) {
  if (!(thickness > 0.0)) throw Error(ErrorKind::InvalidMaterial, "thickness must be positive");
  PlateMaterial m;
  m.thickness_ = thickness;
  m.analytic_ = true;
  m.constant_ = lambda.expression().is_constant() && mu.expression().is_constant();
  m.lambda_expr_ = std::move(lambda);
  m.mu_expr_ = std::move(mu);
  return m;
}

PlateMaterial PlateMaterial::sampled(ScalarField lambda, ScalarField mu, double thickness) {
  if (!(thickness > 0.0)) throw Error(ErrorKind::InvalidMaterial, "thickness must be positive");
  if (!(lambda.grid() == mu.grid())) throw Error(ErrorKind::InvalidMaterial, "Lame fields on different grids");
  if (lambda.chart() || mu.chart()) throw Error(ErrorKind::InvalidMaterial, "sampled moduli must be Cartesian");
  PlateMaterial m;
  m.thickness_ = thickness;
  m.analytic_ = false;
  auto d = std::make_shared<SampledData>();
  const Grid2D& g = lambda.grid();
  std::vector<double> E(g.size()), nu(g.size()), B(g.size()), D(g.size()), N(g.size());
  bool constant = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto s = stiffness(lambda.values()[k], mu.values()[k], thickness);
    E[k] = s.E;
    nu[k] = s.nu;
    B[k] = s.B;
    D[k] = s.D;
    N[k] = s.N;
    constant = constant && lambda.values()[k] == lambda.values()[0] && mu.values()[k] == mu.values()[0];
  }
  m.constant_ = constant;
  d->E = ScalarField(g, E);
  d->nu = ScalarField(g, nu);
  d->B = ScalarField(g, B);
  d->D = ScalarField(g, D);
  d->N = ScalarField(g, N);
  const ScalarField Bx = d->B.derivative(1, 0), By = d->B.derivative(0, 1);
  const ScalarField lapN = d->N.laplacian();
  const ScalarField Dxx = d->D.derivative(2, 0), Dxy = d->D.derivative(1, 1), Dyy = d->D.derivative(0, 2);
  std::vector<double> a1(g.size()), a2(g.size()), q11(g.size()), q12(g.size()), q22(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double b = B[k];
    a1[k] = -2.0 * Bx.values()[k] / b;
    a2[k] = -2.0 * By.values()[k] / b;
    q11[k] = -(Dxx.values()[k] + lapN.values()[k]) / b;
    q12[k] = -Dxy.values()[k] / b;
    q22[k] = -(Dyy.values()[k] + lapN.values()[k]) / b;
  }
  d->a1 = ScalarField(g, a1);
  d->a2 = ScalarField(g, a2);
  d->q11 = ScalarField(g, q11);
  d->q12 = ScalarField(g, q12);
  d->q22 = ScalarField(g, q22);
  d->lambda_c4 = c4_norm(lambda);
  d->mu_c4 = c4_norm(mu);
  d->lambda = std::move(lambda);
  d->mu = std::move(mu);
  m.sampled_ = std::move(d);
  return m;
}

std::string PlateMaterial::description() const {
  if (analytic_) return "lambda = " + lambda_expr_.text() + ", mu = " + mu_expr_.text();
  return "sampled Lame fields";
}

CoefficientSample PlateMaterial::at(double x, double y) const {
  CoefficientSample c;
  if (analytic_) {
    using J = Taylor2<2>;
    const J X = J::variable_x(x), Y = J::variable_y(y);
    const J lam = lambda_expr_.expression()(X, Y);
    const J mu = mu_expr_.expression()(X, Y);
    const auto s = stiffness(lam, mu, thickness_);
    c.lambda = lam.value();
    c.mu = mu.value();
    c.E = s.E.value();
    c.nu = s.nu.value();
    c.B = s.B.value();
    c.D = s.D.value();
    c.N = s.N.value();
    c.a1 = -2.0 * s.B.derivative(1, 0) / c.B;
    c.a2 = -2.0 * s.B.derivative(0, 1) / c.B;
    const double lapN = s.N.derivative(2, 0) + s.N.derivative(0, 2);
    c.q11 = -(s.D.derivative(2, 0) + lapN) / c.B;
    c.q12 = -s.D.derivative(1, 1) / c.B;
    c.q22 = -(s.D.derivative(0, 2) + lapN) / c.B;
    return c;
  }
  const SampledData& d = *sampled_;
  if (!d.B.grid().contains(x, y, 1e-12))
    throw Error(ErrorKind::Extrapolation, "material queried outside its sampled grid");
  c.lambda = d.lambda.interpolate(x, y);
  c.mu = d.mu.interpolate(x, y);
  c.E = d.E.interpolate(x, y);
  c.nu = d.nu.interpolate(x, y);
  c.B = d.B.interpolate(x, y);
  c.D = d.D.interpolate(x, y);
  c.N = d.N.interpolate(x, y);
  c.a1 = d.a1.interpolate(x, y);
  c.a2 = d.a2.interpolate(x, y);
  c.q11 = d.q11.interpolate(x, y);
  c.q12 = d.q12.interpolate(x, y);
  c.q22 = d.q22.interpolate(x, y);
  return c;
}

ConvexityConstants PlateMaterial::measure(const Grid2D& grid) const {
  ConvexityConstants c;
  c.alpha0 = std::numeric_limits<double>::infinity();
  c.gamma0 = std::numeric_limits<double>::infinity();
  if (analytic_) {
    std::array<std::array<double, 15>, 2> sup{};
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const auto X = Taylor2<4>::variable_x(grid.x(i)), Y = Taylor2<4>::variable_y(grid.y(j));
        const auto lam = lambda_expr_.expression()(X, Y);
        const auto mu = mu_expr_.expression()(X, Y);
        c.alpha0 = std::min(c.alpha0, mu.value());
        c.gamma0 = std::min(c.gamma0, 2.0 * mu.value() + 3.0 * lam.value());
        int k = 0;
        for (int order = 0; order <= 4; ++order)
          for (int px = 0; px <= order; ++px, ++k) {
            sup[0][static_cast<std::size_t>(k)] =
                std::max(sup[0][static_cast<std::size_t>(k)], std::abs(lam.derivative(px, order - px)));
            sup[1][static_cast<std::size_t>(k)] =
                std::max(sup[1][static_cast<std::size_t>(k)], std::abs(mu.derivative(px, order - px)));
          }
      }
    double nl = 0.0, nm = 0.0;
    for (std::size_t k = 0; k < 15; ++k) {
      nl += sup[0][k];
      nm += sup[1][k];
    }
    c.Lambda0 = std::max(nl, nm);
    return c;
  }
  const SampledData& d = *sampled_;
  for (std::size_t k = 0; k < d.mu.values().size(); ++k) {
    c.alpha0 = std::min(c.alpha0, d.mu.values()[k]);
    c.gamma0 = std::min(c.gamma0, 2.0 * d.mu.values()[k] + 3.0 * d.lambda.values()[k]);
  }
  c.Lambda0 = std::max(d.lambda_c4, d.mu_c4);
  return c;
}

ConvexityConstants PlateMaterial::validate(const Grid2D& grid,
                                           const std::optional<ConvexityConstants>& declared) const {
  auto check_node = [&](int i, int j, double x, double y, double lam, double mu) {
    const double floor_mu = declared ? declared->alpha0 : 0.0;
    const double floor_gamma = declared ? declared->gamma0 : 0.0;
    if (!(mu > 0.0) || mu < floor_mu)
      throw Error(ErrorKind::InvalidMaterial, "mu = " + std::to_string(mu) + " violates convexity at " +
                                                  node_name(i, j, x, y));
    const double g = 2.0 * mu + 3.0 * lam;
    if (!(g > 0.0) || g < floor_gamma)
      throw Error(ErrorKind::InvalidMaterial, "2 mu + 3 lambda = " + std::to_string(g) +
                                                  " violates convexity at " + node_name(i, j, x, y));
    const double nu = lam / (2.0 * (mu + lam));
    if (!(nu > -1.0 && nu <= 0.5))
      throw Error(ErrorKind::InvalidMaterial, "Poisson ratio out of (-1, 1/2] at " + node_name(i, j, x, y));
  };
  if (analytic_) {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i), y = grid.y(j);
        check_node(i, j, x, y, lambda_expr_.value(x, y), mu_expr_.value(x, y));
      }
  } else {
    const Grid2D& g = sampled_->lambda.grid();
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        check_node(i, j, g.x(i), g.y(j), sampled_->lambda.at(i, j), sampled_->mu.at(i, j));
  }
  const ConvexityConstants measured = measure(analytic_ ? grid : sampled_->lambda.grid());
  if (declared) {
    if (!(declared->alpha0 > 0.0) || !(declared->gamma0 > 0.0))
      throw Error(ErrorKind::InvalidMaterial, "declared convexity constants must be positive");
    if (declared->Lambda0 > 0.0 && measured.Lambda0 > declared->Lambda0 * (1.0 + 1e-12))
      throw Error(ErrorKind::InvalidMaterial, "C^4 norm " + std::to_string(measured.Lambda0) +
                                                  " exceeds Lambda0 = " + std::to_string(declared->Lambda0));
  }
  return measured;
}

DerivedCoefficients derive_coefficients(const PlateMaterial& material, const Grid2D& grid,
                                        std::shared_ptr<const Chart> chart) {
  DerivedCoefficients out;
  out.constants = material.validate(grid);
  std::array<std::vector<double>, 12> v;
  for (auto& a : v) a.resize(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Vec2 p{grid.x(i), grid.y(j)};
      if (chart) p = chart->to_physical(p[0], p[1]);
      const CoefficientSample c = material.at(p[0], p[1]);
      const std::size_t k = grid.index(i, j);
      const double vals[12] = {c.E, c.nu, c.B, c.D, c.N, c.a1, c.a2, c.q11, c.q12, c.q22, 0.0, 0.0};
      for (std::size_t m = 0; m < 10; ++m) v[m][k] = vals[m];
    }
  auto field = [&](std::size_t m) { return ScalarField(grid, v[m], chart); };
  out.E = field(0);
  out.nu = field(1);
  out.B = field(2);
  out.D = field(3);
  out.N = field(4);
  out.a1 = field(5);
  out.a2 = field(6);
  out.q2[0][0] = field(7);
  out.q2[0][1] = field(8);
  out.q2[1][0] = field(8);
  out.q2[1][1] = field(9);
  return out;
}

}  // namespace ucp
