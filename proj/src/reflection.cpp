#include "ucp/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ucp/error.hpp"
#include "ucp/parallel.hpp"

namespace ucp {

namespace {

// Traces combine up to third differences of fields that already hold second
// differences; order 4 leaves truncation above the solver's own h^2 error.
constexpr int kOrder = 6;

void require_upper(const Grid2D& g) {
  if (g.y_min != 0.0) throw Error(ErrorKind::InvalidInput, "reflection needs an upper grid starting at y = 0");
}

// Lower node (i, j) sits at y = -(y of upper node (i, ny - 1 - j)).
int mirror_row(const Grid2D& g, int j) { return g.ny - 1 - j; }

double row_max(const ScalarField& f, int j, double half_width = INFINITY) {
  double m = 0.0;
  for (int i = 0; i < f.grid().nx; ++i)
    if (std::abs(f.grid().x(i)) <= half_width) m = std::max(m, std::abs(f.at(i, j)));
  return m;
}

double row_max_diff(const ScalarField& a, int ja, const ScalarField& b, int jb, double half_width = INFINITY) {
  double m = 0.0;
  for (int i = 0; i < a.grid().nx; ++i)
    if (std::abs(a.grid().x(i)) <= half_width) m = std::max(m, std::abs(a.at(i, ja) - b.at(i, jb)));
  return m;
}

}  // namespace

Grid2D lower_grid(const Grid2D& upper) {
  require_upper(upper);
  return Grid2D(upper.x_min, upper.x_max, -upper.y_max, 0.0, upper.nx, upper.ny);
}

Grid2D merged_grid(const Grid2D& upper) {
  require_upper(upper);
  return Grid2D(upper.x_min, upper.x_max, -upper.y_max, upper.y_max, upper.nx, 2 * upper.ny - 1);
}

ScalarField merge(const ScalarField& upper, const ScalarField& lower) {
  const Grid2D& g = upper.grid();
  if (!(lower.grid() == lower_grid(g))) throw Error(ErrorKind::InvalidInput, "lower field is not on the mirrored grid");
  const Grid2D m = merged_grid(g);
  std::vector<double> v(m.size());
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      v[m.index(i, j)] = j < g.ny - 1 ? lower.at(i, j) : upper.at(i, j - (g.ny - 1));
  return ScalarField(m, std::move(v));
}

ReflectedPair reflect_solution(const ScalarField& u, const ReflectOptions& options) {
  const Grid2D& g = u.grid();
  require_upper(g);
  if (u.chart()) throw Error(ErrorKind::InvalidInput, "reflection needs a flat grid without a chart");
  const ScalarField us = u.with_stencil_order(kOrder);
  const ScalarField uy = us.derivative(0, 1);
  const double scale = std::max(1.0, u.max_abs());
  const double t0 = row_max(u, 0), t1 = row_max(uy, 0);
  if (t0 > options.trace_tolerance * scale || t1 > options.trace_tolerance * scale) {
    std::ostringstream os;
    os << "u is not clamped at y = 0: max|u| = " << t0 << ", max|u_y| = " << t1 << " (tolerance "
       << options.trace_tolerance * scale << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }
  const ScalarField lap = us.laplacian();
  const Grid2D lg = lower_grid(g);
  std::vector<double> w(lg.size());
  parallel_for(lg.ny, [&](int j) {
    const int jm = mirror_row(g, j);
    const double y = lg.y(j);
    for (int i = 0; i < g.nx; ++i)
      w[lg.index(i, j)] = -(u.at(i, jm) + 2.0 * y * uy.at(i, jm) + y * y * lap.at(i, jm));
  });
  ReflectedPair p;
  p.u = u;
  p.w = ScalarField(lg, std::move(w), nullptr, kOrder);
  p.ubar = merge(p.u, p.w);
  return p;
}

SourceExtension extend_source(const ScalarField& F) {
  const Grid2D& g = F.grid();
  require_upper(g);
  const ScalarField Fs = F.with_stencil_order(kOrder);
  const ScalarField Fy = Fs.derivative(0, 1), lap = Fs.laplacian();
  const Grid2D lg = lower_grid(g);
  std::vector<double> f1(lg.size());
  for (int j = 0; j < lg.ny; ++j) {
    const int jm = mirror_row(g, j);
    const double y = lg.y(j);
    for (int i = 0; i < g.nx; ++i)
      f1[lg.index(i, j)] = -(5.0 * F.at(i, jm) - 6.0 * y * Fy.at(i, jm) + y * y * lap.at(i, jm));
  }
  SourceExtension s{ScalarField(lg, std::move(f1)), {}};
  s.Fbar = merge(F, s.F1);
  return s;
}

ReflectedPair with_source(ReflectedPair pair, const ScalarField& F) {
  if (!(F.grid() == pair.u.grid())) throw Error(ErrorKind::InvalidInput, "source and solution grids differ");
  auto ext = extend_source(F);
  pair.F = F;
  pair.F1 = std::move(ext.F1);
  pair.Fbar = std::move(ext.Fbar);
  return pair;
}

double TraceReport::max_identity() const { return std::max({w, wy, lap, lap_y, n1, n2, n3}); }

nlohmann::json TraceReport::to_json() const {
  return {{"h", h},
          {"w", w},
          {"w_y", wy},
          {"laplacian", lap},
          {"laplacian_y", lap_y},
          {"numerator_1", n1},
          {"numerator_2", n2},
          {"numerator_3", n3},
          {"value_jump", value_jump},
          {"gradient_jump", gradient_jump},
          {"half_width", half_width},
          {"max_identity", max_identity()}};
}

TraceReport trace_report(const ReflectedPair& pair, double half_width) {
  const ScalarField u = pair.u.with_stencil_order(kOrder);
  const ScalarField w = pair.w.with_stencil_order(kOrder);
  const int top = w.grid().ny - 1;  // lower-grid row at y = 0
  const double hw = half_width;
  TraceReport r;
  r.h = std::max(u.grid().hx(), u.grid().hy());
  r.half_width = std::min(hw, std::max(std::abs(u.grid().x_min), std::abs(u.grid().x_max)));
  r.w = row_max(w, top, hw);
  r.wy = row_max(w.derivative(0, 1), top, hw);
  const auto lapw = w.derivative(2, 0) + w.derivative(0, 2), lapu = u.derivative(2, 0) + u.derivative(0, 2);
  r.lap = row_max_diff(lapw, top, lapu, 0, hw);
  const auto lapw_y = w.derivative(2, 1) + w.derivative(0, 3), lapu_y = u.derivative(2, 1) + u.derivative(0, 3);
  r.lap_y = row_max_diff(lapw_y, top, lapu_y, 0, hw);
  const auto wyx = w.derivative(1, 1), uyx = u.derivative(1, 1);
  const auto wyy = w.derivative(0, 2), uyy = u.derivative(0, 2);
  const auto uxx = u.derivative(2, 0);
  for (int i = 0; i < u.grid().nx; ++i) {
    if (std::abs(u.grid().x(i)) > hw) continue;
    r.n1 = std::max(r.n1, std::abs(wyx.at(i, top) + uyx.at(i, 0)));
    r.n2 = std::max(r.n2, std::abs(-wyy.at(i, top) + uyy.at(i, 0)));
    r.n3 = std::max(r.n3, std::abs(uxx.at(i, 0)));
  }
  r.value_jump = row_max_diff(w, top, u, 0, hw);
  r.gradient_jump = std::max(row_max_diff(w.derivative(1, 0), top, u.derivative(1, 0), 0, hw),
                             row_max_diff(w.derivative(0, 1), top, u.derivative(0, 1), 0, hw));
  return r;
}

SingularPart singular_part(const ReflectedPair& pair, const ScalarField& a1, const ScalarField& a2,
                           const SingularOptions& options) {
  const Grid2D& g = pair.u.grid();
  if (!(a1.grid() == g) || !(a2.grid() == g)) throw Error(ErrorKind::InvalidInput, "coefficient grid differs");
  SingularPart out;
  out.traces = trace_report(pair, options.half_width);
  const auto& t = out.traces;
  if (std::max({t.n1, t.n2, t.n3}) > options.numerator_tolerance) {
    std::ostringstream os;
    os << "numerators at y = 0 are (" << t.n1 << ", " << t.n2 << ", " << t.n3 << "), tolerance "
       << options.numerator_tolerance;
    throw Error(ErrorKind::TraceIdentity, os.str());
  }
  const Grid2D lg = lower_grid(g);
  const ScalarField u = pair.u.with_stencil_order(kOrder), w = pair.w.with_stencil_order(kOrder);
  const auto wyx = w.derivative(1, 1), wyy = w.derivative(0, 2);
  const auto uyx = u.derivative(1, 1), uyy = u.derivative(0, 2), uxx = u.derivative(2, 0);
  // Numerators on the lower grid, a mirrored evenly.
  std::vector<double> n1(lg.size()), n2(lg.size()), n3(lg.size()), A1(lg.size()), A2(lg.size());
  for (int j = 0; j < lg.ny; ++j) {
    const int jm = mirror_row(g, j);
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = lg.index(i, j);
      n1[n] = wyx.at(i, j) + uyx.at(i, jm);
      n2[n] = -wyy.at(i, j) + uyy.at(i, jm);
      n3[n] = uxx.at(i, jm);
      A1[n] = a1.at(i, jm);
      A2[n] = a2.at(i, jm);
    }
  }
  const ScalarField N1(lg, n1, nullptr, kOrder), N2(lg, n2, nullptr, kOrder), N3(lg, n3, nullptr, kOrder);
  const auto d1 = N1.derivative(0, 1), d2 = N2.derivative(0, 1), d3 = N3.derivative(0, 1);
  const int top = lg.ny - 1;
  const double h = lg.hy();
  std::vector<double> H(lg.size());
  for (int j = 0; j < lg.ny; ++j) {
    const double y = lg.y(j);
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = lg.index(i, j);
      double q1, q2, q3;
      if (j == top) {
        q1 = d1.at(i, j);
        q2 = d2.at(i, j);
        q3 = d3.at(i, j);
      } else if (std::abs(y) < 2.0 * h) {
        q1 = (n1[n] - N1.at(i, top)) / y;
        q2 = (n2[n] - N2.at(i, top)) / y;
        q3 = (n3[n] - N3.at(i, top)) / y;
      } else {
        q1 = n1[n] / y;
        q2 = n2[n] / y;
        q3 = n3[n] / y;
      }
      H[n] = 6.0 * A1[n] * q1 + 6.0 * A2[n] * q2 - 12.0 * A2[n] * q3;
    }
  }
  out.H = ScalarField(lg, std::move(H));
  return out;
}

std::vector<TestFunction> default_test_functions() {
  return {{0.0, 0.0, 0.5},  {0.3, -0.1, 0.4}, {-0.4, 0.2, 0.35},
          {0.0, 0.3, 0.5},  {0.2, -0.4, 0.3}, {-0.1, 0.05, 0.7}};
}

WeakFormResult verify_weak_form(const ScalarField& ubar, const std::optional<ScalarField>& Fbar,
                                const std::vector<TestFunction>& tests) {
  const Grid2D& g = ubar.grid();
  if (Fbar && !(Fbar->grid() == g)) throw Error(ErrorKind::InvalidInput, "source and solution grids differ");
  for (const auto& t : tests) {
    if (!(t.radius > 0.0) || std::hypot(t.cx, t.cy) + t.radius >= 1.0) {
      std::ostringstream os;
      os << "test disc centred at (" << t.cx << ", " << t.cy << ") with radius " << t.radius
         << " reaches the unit circle";
      throw Error(ErrorKind::InvalidTest, os.str());
    }
    const double mx = 4.0 * g.hx(), my = 4.0 * g.hy();
    if (t.cx - t.radius <= g.x_min + mx || t.cx + t.radius >= g.x_max - mx || t.cy - t.radius <= g.y_min + my ||
        t.cy + t.radius >= g.y_max - my)
      throw Error(ErrorKind::InvalidTest, "test disc leaves the grid");
  }
  const ScalarField lap = ubar.laplacian();
  const double cell = g.hx() * g.hy();
  WeakFormResult out;
  out.residuals.resize(tests.size());
  parallel_for(static_cast<int>(tests.size()), [&](int k) {
    const TestFunction& t = tests[static_cast<std::size_t>(k)];
    const double r2 = t.radius * t.radius;
    const ScalarField phi = ScalarField::sample(g, [&](double x, double y) {
      const double q = ((x - t.cx) * (x - t.cx) + (y - t.cy) * (y - t.cy)) / r2;
      return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
    });
    // Discrete Laplacian of phi: node sums then obey summation by parts.
    const ScalarField lphi = phi.laplacian();
    double a = 0.0, b = 0.0, norm = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      a += lap.values()[n] * lphi.values()[n];
      if (Fbar) b += Fbar->values()[n] * phi.values()[n];
      norm += lphi.values()[n] * lphi.values()[n];
    }
    out.residuals[static_cast<std::size_t>(k)] = std::abs(a - b) * cell / std::sqrt(norm * cell);
  });
  for (double r : out.residuals) out.max_residual = std::max(out.max_residual, r);
  return out;
}

WeakFormResult verify_weak_form(const ReflectedPair& pair, const std::vector<TestFunction>& tests) {
  if (!pair.Fbar) return verify_weak_form(pair.ubar, std::nullopt, tests);
  // Fbar jumps across y = 0; the interface row takes the mean of both limits.
  ScalarField Fbar = *pair.Fbar;
  const int row = pair.u.grid().ny - 1;
  for (int i = 0; i < Fbar.grid().nx; ++i)
    Fbar.set(i, row, 0.5 * (pair.F->at(i, 0) + pair.F1->at(i, row)));
  return verify_weak_form(pair.ubar, Fbar, tests);
}

double bilaplacian_residual(const ScalarField& ubar, const std::optional<ScalarField>& Fbar, double radius,
                            int margin) {
  const Grid2D& g = ubar.grid();
  const auto b = ubar.derivative(4, 0) + 2.0 * ubar.derivative(2, 2) + ubar.derivative(0, 4);
  double m = 0.0;
  for (int j = margin; j < g.ny - margin; ++j) {
    if (g.y(j) >= 0.0) break;
    for (int i = margin; i < g.nx - margin; ++i) {
      if (std::hypot(g.x(i), g.y(j)) > radius) continue;
      m = std::max(m, std::abs(b.at(i, j) - (Fbar ? Fbar->at(i, j) : 0.0)));
    }
  }
  return m;
}

}  // namespace ucp
