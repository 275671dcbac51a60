#include "ucp/plate.hpp"

#include <cmath>

#include "ucp/error.hpp"
#include "ucp/parallel.hpp"

namespace ucp {

BoundaryData boundary_from(const AnalyticField& v) {
  return [v](double x, double y) {
    const auto j = v.jet(x, y);
    return BoundaryValues{j.value(), j.derivative(1, 0), j.derivative(0, 1)};
  };
}

BoundaryData zero_boundary() {
  return [](double, double) { return BoundaryValues{}; };
}

namespace {

// Unknowns are the interior nodes; boundary nodes carry data and ghost nodes
// one step outside are eliminated through the normal-derivative data.
class Layout {
 public:
  Layout(const Grid2D& g, const BoundaryData& outer) : g_(g) {
    if (g.nx < 5 || g.ny < 5) throw Error(ErrorKind::InvalidInput, "plate grid needs at least 5x5 nodes");
    const BoundaryData data = outer ? outer : zero_boundary();
    boundary_.assign(g.size(), 0.0);
    left_.assign(static_cast<std::size_t>(g.ny), 0.0);
    right_.assign(static_cast<std::size_t>(g.ny), 0.0);
    top_.assign(static_cast<std::size_t>(g.nx), 0.0);
    for (int j = 1; j < g.ny; ++j) {
      const auto l = data(g.x_min, g.y(j)), r = data(g.x_max, g.y(j));
      boundary_[g.index(0, j)] = l.v;
      boundary_[g.index(g.nx - 1, j)] = r.v;
      left_[static_cast<std::size_t>(j)] = l.vx;
      right_[static_cast<std::size_t>(j)] = r.vx;
    }
    for (int i = 1; i < g.nx - 1; ++i) {
      const auto t = data(g.x(i), g.y_max);
      boundary_[g.index(i, g.ny - 1)] = t.v;
      top_[static_cast<std::size_t>(i)] = t.vy;
    }
    // Clamped side: v = v_y = 0 (the bottom corners too).
    for (int i = 0; i < g.nx; ++i) boundary_[g.index(i, 0)] = 0.0;
  }

  int unknowns() const { return (g_.nx - 2) * (g_.ny - 2); }
  int unknown(int i, int j) const { return (j - 1) * (g_.nx - 2) + (i - 1); }
  const Grid2D& grid() const { return g_; }
  double boundary_value(int i, int j) const { return boundary_[g_.index(i, j)]; }

  struct Row {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
  };

  // row += w * v(i, j), for -1 <= i <= nx and -1 <= j <= ny.
  void add(Row& row, int i, int j, double w) const {
    const int nx = g_.nx, ny = g_.ny;
    if (i == -1) {
      row.constant -= w * 2.0 * g_.hx() * left_[static_cast<std::size_t>(j < 0 ? 1 : std::min(j, ny - 1))];
      add(row, 1, j, w);
      return;
    }
    if (i == nx) {
      row.constant += w * 2.0 * g_.hx() * right_[static_cast<std::size_t>(j < 0 ? 1 : std::min(j, ny - 1))];
      add(row, nx - 2, j, w);
      return;
    }
    if (j == -1) {
      add(row, i, 1, w);  // clamped: v_y = 0
      return;
    }
    if (j == ny) {
      row.constant += w * 2.0 * g_.hy() * top_[static_cast<std::size_t>(i)];
      add(row, i, ny - 2, w);
      return;
    }
    if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
      row.constant += w * boundary_value(i, j);
      return;
    }
    row.terms.emplace_back(unknown(i, j), w);
  }

  ScalarField expand(const Eigen::VectorXd& x) const {
    std::vector<double> v(g_.size());
    for (int j = 0; j < g_.ny; ++j)
      for (int i = 0; i < g_.nx; ++i) {
        const bool inner = i > 0 && j > 0 && i < g_.nx - 1 && j < g_.ny - 1;
        v[g_.index(i, j)] = inner ? x[unknown(i, j)] : boundary_value(i, j);
      }
    return ScalarField(g_, std::move(v));
  }

 private:
  Grid2D g_;
  std::vector<double> boundary_, left_, right_, top_;
};

PlateSolution assemble_and_solve(const Layout& layout, const std::function<void(Layout::Row&, int, int)>& build,
                                 const std::function<double(double, double)>& forcing, bool symmetric,
                                 const SolverOptions& options) {
  const Grid2D& g = layout.grid();
  const int n = layout.unknowns();
  std::vector<Layout::Row> rows(static_cast<std::size_t>(n));
  parallel_for(g.ny - 2, [&](int jj) {
    const int j = jj + 1;
    for (int i = 1; i < g.nx - 1; ++i) build(rows[static_cast<std::size_t>(layout.unknown(i, j))], i, j);
  });
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b(n);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const int r = layout.unknown(i, j);
      const auto& row = rows[static_cast<std::size_t>(r)];
      for (const auto& [c, w] : row.terms) triplets.emplace_back(r, c, w);
      b[r] = (forcing ? forcing(g.x(i), g.y(j)) : 0.0) - row.constant;
    }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.prune(0.0);
  PlateSolution out;
  const Eigen::VectorXd x = solve_sparse(A, b, symmetric, options, out.report.linear);
  out.v = layout.expand(x);
  const ScalarField vy = out.v.derivative(0, 1);
  for (int i = 0; i < g.nx; ++i) {
    out.report.clamped_value = std::max(out.report.clamped_value, std::abs(out.v.at(i, 0)));
    out.report.clamped_normal_fd = std::max(out.report.clamped_normal_fd, std::abs(vy.at(i, 0)));
  }
  return out;
}

bool empty(const ScalarField& f) { return f.values().empty(); }

double value_or_zero(const ScalarField& f, int i, int j) { return empty(f) ? 0.0 : f.at(i, j); }

void check_grid(const ScalarField& f, const Grid2D& g, const char* name) {
  if (!empty(f) && !(f.grid() == g))
    throw Error(ErrorKind::InvalidInput, std::string("coefficient ") + name + " is not on the problem grid");
}

}  // namespace

PlateSolution solve_plate(const PlateProblem& problem, const SolverOptions& options) {
  const Grid2D& g = problem.grid;
  problem.material.validate(g);
  const Layout layout(g, problem.outer);
  std::vector<double> D(g.size()), N(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto c = problem.material.at(g.x(i), g.y(j));
      D[g.index(i, j)] = c.D;
      N[g.index(i, j)] = c.N;
    }
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy()), ihxy = 1.0 / (g.hx() * g.hy());
  auto Dn = [&](int i, int j) { return D[g.index(i, j)]; };
  auto Nn = [&](int i, int j) { return N[g.index(i, j)]; };
  // Moments at nodes (M11, M22) and cell centres (M12), scaled by w.
  auto m11 = [&](Layout::Row& row, int p, int q, double w) {
    const double a = (Dn(p, q) + Nn(p, q)) * w * ihx2, c = Nn(p, q) * w * ihy2;
    layout.add(row, p - 1, q, a);
    layout.add(row, p, q, -2.0 * a - 2.0 * c);
    layout.add(row, p + 1, q, a);
    layout.add(row, p, q - 1, c);
    layout.add(row, p, q + 1, c);
  };
  auto m22 = [&](Layout::Row& row, int p, int q, double w) {
    const double a = (Dn(p, q) + Nn(p, q)) * w * ihy2, c = Nn(p, q) * w * ihx2;
    layout.add(row, p, q - 1, a);
    layout.add(row, p, q, -2.0 * a - 2.0 * c);
    layout.add(row, p, q + 1, a);
    layout.add(row, p - 1, q, c);
    layout.add(row, p + 1, q, c);
  };
  // Cell with lower-left node (p, q).
  auto m12 = [&](Layout::Row& row, int p, int q, double w) {
    const double dc = 0.25 * (Dn(p, q) + Dn(p + 1, q) + Dn(p, q + 1) + Dn(p + 1, q + 1)) * w * ihxy;
    layout.add(row, p + 1, q + 1, dc);
    layout.add(row, p, q + 1, -dc);
    layout.add(row, p + 1, q, -dc);
    layout.add(row, p, q, dc);
  };
  auto build = [&](Layout::Row& row, int i, int j) {
    m11(row, i - 1, j, ihx2);
    m11(row, i, j, -2.0 * ihx2);
    m11(row, i + 1, j, ihx2);
    m22(row, i, j - 1, ihy2);
    m22(row, i, j, -2.0 * ihy2);
    m22(row, i, j + 1, ihy2);
    m12(row, i, j, 2.0 * ihxy);
    m12(row, i - 1, j, -2.0 * ihxy);
    m12(row, i, j - 1, -2.0 * ihxy);
    m12(row, i - 1, j - 1, 2.0 * ihxy);
  };
  return assemble_and_solve(layout, build, problem.forcing, true, options);
}

PlateSolution solve_nondiv(const NondivProblem& problem, const SolverOptions& options) {
  const Grid2D& g = problem.grid;
  const NondivCoefficients& c = problem.coeffs;
  check_grid(c.a1, g, "a1");
  check_grid(c.a2, g, "a2");
  check_grid(c.c11, g, "c11");
  check_grid(c.c12, g, "c12");
  check_grid(c.c22, g, "c22");
  check_grid(c.c1, g, "c1");
  check_grid(c.c2, g, "c2");
  const Layout layout(g, problem.outer);
  const double hx = g.hx(), hy = g.hy();
  const double ihx2 = 1.0 / (hx * hx), ihy2 = 1.0 / (hy * hy);
  auto lap = [&](Layout::Row& row, int p, int q, double w) {
    layout.add(row, p - 1, q, w * ihx2);
    layout.add(row, p + 1, q, w * ihx2);
    layout.add(row, p, q - 1, w * ihy2);
    layout.add(row, p, q + 1, w * ihy2);
    layout.add(row, p, q, -2.0 * w * (ihx2 + ihy2));
  };
  auto build = [&](Layout::Row& row, int i, int j) {
    // lap_h lap_h: 13-point stencil.
    lap(row, i - 1, j, ihx2);
    lap(row, i + 1, j, ihx2);
    lap(row, i, j - 1, ihy2);
    lap(row, i, j + 1, ihy2);
    lap(row, i, j, -2.0 * (ihx2 + ihy2));
    const double a1 = value_or_zero(c.a1, i, j), a2 = value_or_zero(c.a2, i, j);
    if (a1 != 0.0) {
      lap(row, i + 1, j, -a1 / (2.0 * hx));
      lap(row, i - 1, j, a1 / (2.0 * hx));
    }
    if (a2 != 0.0) {
      lap(row, i, j + 1, -a2 / (2.0 * hy));
      lap(row, i, j - 1, a2 / (2.0 * hy));
    }
    const double c11 = value_or_zero(c.c11, i, j), c12 = value_or_zero(c.c12, i, j),
                 c22 = value_or_zero(c.c22, i, j), c1 = value_or_zero(c.c1, i, j), c2 = value_or_zero(c.c2, i, j);
    if (c11 != 0.0) {
      layout.add(row, i - 1, j, -c11 * ihx2);
      layout.add(row, i, j, 2.0 * c11 * ihx2);
      layout.add(row, i + 1, j, -c11 * ihx2);
    }
    if (c22 != 0.0) {
      layout.add(row, i, j - 1, -c22 * ihy2);
      layout.add(row, i, j, 2.0 * c22 * ihy2);
      layout.add(row, i, j + 1, -c22 * ihy2);
    }
    if (c12 != 0.0) {
      const double w = -2.0 * c12 / (4.0 * hx * hy);
      layout.add(row, i + 1, j + 1, w);
      layout.add(row, i - 1, j - 1, w);
      layout.add(row, i + 1, j - 1, -w);
      layout.add(row, i - 1, j + 1, -w);
    }
    if (c1 != 0.0) {
      layout.add(row, i + 1, j, -c1 / (2.0 * hx));
      layout.add(row, i - 1, j, c1 / (2.0 * hx));
    }
    if (c2 != 0.0) {
      layout.add(row, i, j + 1, -c2 / (2.0 * hy));
      layout.add(row, i, j - 1, c2 / (2.0 * hy));
    }
  };
  return assemble_and_solve(layout, build, problem.forcing, false, options);
}

NondivCoefficients plate_coefficients(const PlateMaterial& material, const Grid2D& grid) {
  NondivCoefficients out;
  if (material.is_constant()) return out;
  std::array<std::vector<double>, 5> v;
  for (auto& a : v) a.resize(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const auto s = material.at(grid.x(i), grid.y(j));
      const std::size_t k = grid.index(i, j);
      v[0][k] = s.a1;
      v[1][k] = s.a2;
      v[2][k] = s.q11;
      v[3][k] = s.q12;
      v[4][k] = s.q22;
    }
  out.a1 = ScalarField(grid, v[0]);
  out.a2 = ScalarField(grid, v[1]);
  out.c11 = ScalarField(grid, v[2]);
  out.c12 = ScalarField(grid, v[3]);
  out.c22 = ScalarField(grid, v[4]);
  return out;
}

ScalarField apply_divergence_operator(const ScalarField& v, const PlateMaterial& material) {
  if (v.chart()) throw Error(ErrorKind::InvalidInput, "divergence operator needs a Cartesian field");
  const Grid2D& g = v.grid();
  std::vector<double> D(g.size()), N(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto c = material.at(g.x(i), g.y(j));
      D[g.index(i, j)] = c.D;
      N[g.index(i, j)] = c.N;
    }
  const ScalarField Df(g, D), Nf(g, N);
  const ScalarField vxx = v.derivative(2, 0), vxy = v.derivative(1, 1), vyy = v.derivative(0, 2);
  const ScalarField lapv = vxx + vyy;
  const ScalarField M11 = Df * vxx + Nf * lapv;
  const ScalarField M22 = Df * vyy + Nf * lapv;
  const ScalarField M12 = Df * vxy;
  return M11.derivative(2, 0) + 2.0 * M12.derivative(1, 1) + M22.derivative(0, 2);
}

ResidualField residual_nondiv(const ScalarField& v, const PlateMaterial& material,
                              const std::function<double(double, double)>& forcing, int margin) {
  if (v.chart()) throw Error(ErrorKind::InvalidInput, "residual needs a Cartesian field");
  const Grid2D& g = v.grid();
  if (margin < 0 || g.nx <= 2 * margin || g.ny <= 2 * margin)
    throw Error(ErrorKind::InvalidInput, "grid too small for the residual margin");
  const ScalarField bilap = v.derivative(4, 0) + 2.0 * v.derivative(2, 2) + v.derivative(0, 4);
  const ScalarField lap_x = v.derivative(3, 0) + v.derivative(1, 2);
  const ScalarField lap_y = v.derivative(2, 1) + v.derivative(0, 3);
  const ScalarField vxx = v.derivative(2, 0), vxy = v.derivative(1, 1), vyy = v.derivative(0, 2);
  ResidualField out;
  out.margin = margin;
  out.shrunk = margin > 0;
  std::vector<double> r(g.size(), 0.0);
  for (int j = margin; j < g.ny - margin; ++j)
    for (int i = margin; i < g.nx - margin; ++i) {
      const double x = g.x(i), y = g.y(j);
      double value = bilap.at(i, j);
      if (!material.is_constant()) {
        const auto c = material.at(x, y);
        value -= c.a1 * lap_x.at(i, j) + c.a2 * lap_y.at(i, j);
        value -= c.q11 * vxx.at(i, j) + 2.0 * c.q12 * vxy.at(i, j) + c.q22 * vyy.at(i, j);
        if (forcing) value -= forcing(x, y) / c.B;
      } else if (forcing) {
        value -= forcing(x, y) / material.at(x, y).B;
      }
      r[g.index(i, j)] = value;
      out.interior_max = std::max(out.interior_max, std::abs(value));
    }
  out.residual = ScalarField(g, std::move(r));
  return out;
}

}  // namespace ucp
