#include "ucp/conformal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ucp/error.hpp"
#include "ucp/parallel.hpp"

namespace ucp {

TransfiniteChart::TransfiniteChart(UnivariateFunction bottom, double half_width, double top)
    : g_(std::move(bottom)), w_(half_width), H_(top) {
  if (!(half_width > 0.0) || !(top > 0.0)) throw Error(ErrorKind::InvalidInput, "degenerate chart");
}

Vec2 TransfiniteChart::to_physical(double s, double t) const {
  const double x1 = w_ * s;
  const double G = g_(x1);
  return {x1, G + t * (H_ - G)};
}

std::optional<Vec2> TransfiniteChart::to_computational(double x, double y) const {
  const double s = x / w_;
  if (std::abs(s) > 1.0 + 1e-12) return std::nullopt;
  const double G = g_(std::clamp(x, -w_, w_));
  return Vec2{s, (y - G) / (H_ - G)};
}

Mat2 TransfiniteChart::inverse_jacobian(double s, double t) const {
  const Derivatives d = g_.derivatives(w_ * s);
  const double D = H_ - d[0];
  return {1.0 / w_, 0.0, d[1] * (t - 1.0) / D, 1.0 / D};
}

namespace {

// Cumulative integral of uniformly spaced samples, fourth order.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw Error(ErrorKind::InvalidInput, "cumulative integration needs at least 4 samples");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  auto F = [&](int k) { return f[static_cast<std::size_t>(k)]; };
  for (int k = 0; k + 1 < n; ++k) {
    double piece;
    if (k == 0)
      piece = 9.0 * F(0) + 19.0 * F(1) - 5.0 * F(2) + F(3);
    else if (k == n - 2)
      piece = F(n - 4) - 5.0 * F(n - 3) + 19.0 * F(n - 2) + 9.0 * F(n - 1);
    else
      piece = -F(k - 1) + 13.0 * F(k) + 13.0 * F(k + 1) - F(k + 2);
    out[static_cast<std::size_t>(k + 1)] = out[static_cast<std::size_t>(k)] + piece * h / 24.0;
  }
  return out;
}

struct ColumnGeometry {
  double G, G1, G2, D;
};

std::vector<ColumnGeometry> column_geometry(const TransfiniteChart& chart, const Grid2D& grid) {
  std::vector<ColumnGeometry> cols(static_cast<std::size_t>(grid.nx));
  for (int i = 0; i < grid.nx; ++i) {
    const Derivatives d = chart.bottom().derivatives(chart.half_width() * grid.x(i));
    cols[static_cast<std::size_t>(i)] = {d[0], d[1], d[2], chart.top() - d[0]};
  }
  return cols;
}

}  // namespace

FlatteningResult solve_flattening_bvp(const ExtendedGraph& graph, const FlatteningOptions& options) {
  const double r0 = graph.parent.r0, M0 = graph.parent.M0;
  auto chart = std::make_shared<TransfiniteChart>(graph.gtilde, 2.0 * r0, 2.0 * M0 * r0);
  const Grid2D grid(-1.0, 1.0, 0.0, 1.0, options.nx, options.ny);
  if (grid.nx < 5 || grid.ny < 5) throw Error(ErrorKind::InvalidInput, "flattening mesh needs at least 5x5 nodes");
  const auto cols = column_geometry(*chart, grid);
  for (const auto& c : cols)
    if (!(c.D > 0.0)) throw Error(ErrorKind::Solver, "degenerate mesh: graph reaches the top side");
  const int nx = grid.nx, ny = grid.ny;
  const double hs = grid.hx(), ht = grid.hy();
  const double w = 2.0 * r0;
  auto unknown = [&](int i, int j) { return (j - 1) * nx + i; };
  const int n = nx * (ny - 2);

  struct Row {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
  };
  auto add = [&](Row& row, int i, int j, double c) {
    if (i == -1) i = 1;  // k_s = 0 on the lateral sides
    if (i == nx) i = nx - 2;
    if (j == 0) return;  // k = 0 on the graph
    if (j == ny - 1) {
      row.constant += c;  // k = 1 on top
      return;
    }
    row.terms.emplace_back(unknown(i, j), c);
  };
  std::vector<Row> rows(static_cast<std::size_t>(n));
  std::vector<std::array<double, 4>> coeff(static_cast<std::size_t>(n));
  parallel_for(ny - 2, [&](int jj) {
    const int j = jj + 1;
    const double t = grid.y(j);
    for (int i = 0; i < nx; ++i) {
      const auto& c = cols[static_cast<std::size_t>(i)];
      const double tx = c.G1 * (t - 1.0) / c.D, ty = 1.0 / c.D;
      const double a11 = 1.0 / (w * w), a12 = tx / w, a22 = tx * tx + ty * ty;
      const double b = (t - 1.0) * (c.G2 * c.D + 2.0 * c.G1 * c.G1) / (c.D * c.D);
      Row& row = rows[static_cast<std::size_t>(unknown(i, j))];
      add(row, i - 1, j, a11 / (hs * hs));
      add(row, i + 1, j, a11 / (hs * hs));
      add(row, i, j, -2.0 * a11 / (hs * hs) - 2.0 * a22 / (ht * ht));
      add(row, i, j - 1, a22 / (ht * ht) - b / (2.0 * ht));
      add(row, i, j + 1, a22 / (ht * ht) + b / (2.0 * ht));
      if (a12 != 0.0) {
        const double m = 2.0 * a12 / (4.0 * hs * ht);
        add(row, i + 1, j + 1, m);
        add(row, i - 1, j - 1, m);
        add(row, i + 1, j - 1, -m);
        add(row, i - 1, j + 1, -m);
      }
      coeff[static_cast<std::size_t>(unknown(i, j))] = {a11, a12, a22, b};
    }
  });
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(n);
  for (int r = 0; r < n; ++r) {
    for (const auto& [c, v] : rows[static_cast<std::size_t>(r)].terms) triplets.emplace_back(r, c, v);
    rhs[r] = -rows[static_cast<std::size_t>(r)].constant;
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  FlatteningResult out;
  const Eigen::VectorXd x = solve_sparse(A, rhs, false, options.solver, out.linear);
  out.discrete_residual = (A * x - rhs).lpNorm<Eigen::Infinity>();
  std::vector<double> k(grid.size(), 0.0);
  for (int i = 0; i < nx; ++i) k[grid.index(i, ny - 1)] = 1.0;
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) k[grid.index(i, j)] = x[unknown(i, j)];
  out.chart = chart;
  out.graph = graph;
  out.k = ScalarField(grid, std::move(k), chart);
  out.interior_min = std::numeric_limits<double>::infinity();
  out.interior_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    out.trace_graph = std::max(out.trace_graph, std::abs(out.k.at(i, 0)));
    out.trace_top = std::max(out.trace_top, std::abs(out.k.at(i, ny - 1) - 1.0));
  }
  const ScalarField kss = out.k.derivative(2, 0), kst = out.k.derivative(1, 1), ktt = out.k.derivative(0, 2),
                    kt = out.k.derivative(0, 1);
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i) {
      const double v = out.k.at(i, j);
      out.interior_min = std::min(out.interior_min, v);
      out.interior_max = std::max(out.interior_max, v);
      const auto& c = coeff[static_cast<std::size_t>(unknown(i, j))];
      const double lap = c[0] * kss.at(i, j) + 2.0 * c[1] * kst.at(i, j) + c[2] * ktt.at(i, j) + c[3] * kt.at(i, j);
      out.stencil_laplacian = std::max(out.stencil_laplacian, std::abs(lap));
    }
  if (!(out.interior_min > 0.0) || !(out.interior_max < 1.0)) {
    std::ostringstream os;
    os << "harmonic potential leaves (0, 1) at interior nodes: min " << out.interior_min << ", max "
       << out.interior_max;
    throw Error(ErrorKind::Certification, os.str());
  }
  return out;
}

ConjugateResult harmonic_conjugate(const FlatteningResult& flat, double tolerance) {
  const ScalarField& k = flat.k;
  const Grid2D& grid = k.grid();
  const int nx = grid.nx, ny = grid.ny;
  const auto cols = column_geometry(*flat.chart, grid);
  const auto [kx1, kx2] = physical_gradient(k);
  const double w = flat.chart->half_width();
  std::vector<double> h(grid.size(), 0.0);
  // Along the graph: dh/ds = w (k_x2 - k_x1 G').
  std::vector<double> f(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i)
    f[static_cast<std::size_t>(i)] = w * (kx2.at(i, 0) - kx1.at(i, 0) * cols[static_cast<std::size_t>(i)].G1);
  const auto bottom = cumulative_integral(f, grid.hx());
  // Up each column: dh/dt = -k_x1 (H - G).
  parallel_for(nx, [&](int i) {
    std::vector<double> g(static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) g[static_cast<std::size_t>(j)] = -kx1.at(i, j) * cols[static_cast<std::size_t>(i)].D;
    const auto col = cumulative_integral(g, grid.hy());
    for (int j = 0; j < ny; ++j) h[grid.index(i, j)] = bottom[static_cast<std::size_t>(i)] + col[static_cast<std::size_t>(j)];
  });
  ConjugateResult out;
  out.a = 0.0;
  out.b = bottom.back();
  // Closing path along the top: dh/ds = w k_x2.
  std::vector<double> top(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) top[static_cast<std::size_t>(i)] = w * kx2.at(i, ny - 1);
  const auto along_top = cumulative_integral(top, grid.hx());
  out.loop_closure = std::abs(h[grid.index(0, ny - 1)] + along_top.back() - h[grid.index(nx - 1, ny - 1)]);
  for (int j = 0; j < ny; ++j) {
    out.lateral_variation = std::max(out.lateral_variation, std::abs(h[grid.index(0, j)] - out.a));
    out.lateral_variation = std::max(out.lateral_variation, std::abs(h[grid.index(nx - 1, j)] - out.b));
  }
  out.graph_min_step = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < nx; ++i) out.graph_min_step = std::min(out.graph_min_step, bottom[static_cast<std::size_t>(i + 1)] - bottom[static_cast<std::size_t>(i)]);
  out.h = ScalarField(grid, std::move(h), flat.chart);
  if (out.loop_closure > tolerance * (out.b - out.a)) {
    std::ostringstream os;
    os << "conjugate differential is not exact: loop closure " << out.loop_closure << " exceeds "
       << tolerance << " * (b - a)";
    throw Error(ErrorKind::NonExactness, os.str());
  }
  return out;
}

struct ConformalMap::Fields {
  ScalarField kx1, kx2, kx1x1, kx1x2;
  struct Seed {
    double h, k, s, t;
  };
  std::vector<Seed> seeds;
  double h_range = 1.0;
};

double ConformalMap::scale() const { return 2.0 * std::sqrt(2.0) / cert_.c0; }

Vec2 ConformalMap::psi(Vec2 x) const {
  const auto st = flat_->chart->to_computational(x[0], x[1]);
  if (!st) throw Error(ErrorKind::Extrapolation, "point outside the extended domain");
  return {conj_->h.interpolate((*st)[0], (*st)[1]), flat_->k.interpolate((*st)[0], (*st)[1])};
}

Vec2 ConformalMap::theta(Vec2 xi) const { return {scale() * (xi[0] - cert_.xi1_bar), scale() * xi[1]}; }

Vec2 ConformalMap::theta_inverse(Vec2 y) const { return {y[0] / scale() + cert_.xi1_bar, y[1] / scale()}; }

Vec2 ConformalMap::solve_psi(Vec2 xi) const {
  const Fields& f = *fields_;
  const auto* best = &f.seeds.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : f.seeds) {
    const double dh = (s.h - xi[0]) / f.h_range, dk = s.k - xi[1];
    const double d = dh * dh + dk * dk;
    if (d < best_d) {
      best_d = d;
      best = &s;
    }
  }
  double s = best->s, t = best->t;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    const SplineSample hs = conj_->h.interpolate_with_gradient(s, t);
    const SplineSample ks = flat_->k.interpolate_with_gradient(s, t);
    const double r1 = hs.value - xi[0], r2 = ks.value - xi[1];
    res = std::max(std::abs(r1), std::abs(r2));
    if (res <= 1e-14 * std::max(1.0, f.h_range)) break;
    const double det = hs.ds * ks.dt - hs.dt * ks.ds;
    if (!(std::abs(det) > 0.0)) break;
    const double ds = (ks.dt * r1 - hs.dt * r2) / det, dt = (-ks.ds * r1 + hs.ds * r2) / det;
    s = std::clamp(s - ds, -1.0, 1.0);
    t = std::clamp(t - dt, 0.0, 1.0);
    if (std::max(std::abs(ds), std::abs(dt)) < 1e-15) {
      const SplineSample h2 = conj_->h.interpolate_with_gradient(s, t);
      const SplineSample k2 = flat_->k.interpolate_with_gradient(s, t);
      res = std::max(std::abs(h2.value - xi[0]), std::abs(k2.value - xi[1]));
      break;
    }
  }
  if (!(res <= 1e-10 * std::max(1.0, f.h_range))) {
    std::ostringstream os;
    os << "Newton inversion of Theta o Psi failed at xi = (" << xi[0] << ", " << xi[1] << "), residual " << res;
    throw Error(ErrorKind::NonInjective, os.str());
  }
  return {s, t};
}

Vec2 ConformalMap::forward(Vec2 y) const {
  const Vec2 st = solve_psi(theta_inverse(y));
  return flat_->chart->to_physical(st[0], st[1]);
}

std::optional<Vec2> ConformalMap::inverse(Vec2 x) const {
  const auto st = flat_->chart->to_computational(x[0], x[1]);
  if (!st || !flat_->k.grid().contains((*st)[0], (*st)[1], 1e-9)) return std::nullopt;
  const double s = std::clamp((*st)[0], -1.0, 1.0), t = std::clamp((*st)[1], 0.0, 1.0);
  return theta({conj_->h.interpolate(s, t), flat_->k.interpolate(s, t)});
}

std::array<double, 2> ConformalMap::gradient_k(double s, double t) const {
  return {fields_->kx1.interpolate(s, t), fields_->kx2.interpolate(s, t)};
}

std::pair<std::complex<double>, std::complex<double>> ConformalMap::derivatives(Vec2 x) const {
  const auto st = flat_->chart->to_computational(x[0], x[1]);
  if (!st) throw Error(ErrorKind::Extrapolation, "point outside the extended domain");
  const double s = std::clamp((*st)[0], -1.0, 1.0), t = std::clamp((*st)[1], 0.0, 1.0);
  const double sc = scale();
  const auto g = gradient_k(s, t);
  const std::complex<double> d1(sc * g[1], sc * g[0]);
  const std::complex<double> d2(sc * fields_->kx1x2.interpolate(s, t), sc * fields_->kx1x1.interpolate(s, t));
  return {d1, d2};
}

Mat2 ConformalMap::inverse_differential(Vec2 x) const {
  const auto d1 = derivatives(x).first;
  return {d1.real(), -d1.imag(), d1.imag(), d1.real()};
}

Mat2 ConformalMap::differential(Vec2 y) const {
  const auto d1 = derivatives(forward(y)).first;
  const double m = std::norm(d1);
  return {d1.real() / m, d1.imag() / m, -d1.imag() / m, d1.real() / m};
}

namespace {

double frobenius(const Mat2& m) { return std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]); }

}  // namespace

ConformalMap ConformalMap::assemble(const FlatteningResult& flat, const ConjugateResult& conj,
                                    const CertifyOptions& options) {
  ConformalMap map;
  map.flat_ = std::make_shared<FlatteningResult>(flat);
  map.conj_ = std::make_shared<ConjugateResult>(conj);
  auto fields = std::make_shared<Fields>();
  const Grid2D& grid = flat.k.grid();
  std::tie(fields->kx1, fields->kx2) = physical_gradient(flat.k);
  fields->kx1x1 = physical_gradient(fields->kx1).first;
  fields->kx1x2 = physical_gradient(fields->kx2).first;
  MapCertificate& c = map.cert_;
  c.r0 = flat.graph.parent.r0;
  c.M0 = flat.graph.parent.M0;
  c.mesh_nx = grid.nx;
  c.mesh_ny = grid.ny;
  c.a = conj.a;
  c.b = conj.b;
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0, kx2min = gmin;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double g = std::hypot(fields->kx1.values()[n], fields->kx2.values()[n]);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    kx2min = std::min(kx2min, fields->kx2.values()[n]);
  }
  c.c0 = std::min(c.r0 * gmin, 2.0);
  c.C0 = c.r0 * gmax;
  c.min_kx2 = c.r0 * kx2min;
  c.K = 4.0 * c.C0 / c.c0 * (c.M0 + 1.0 + std::sqrt(c.M0 * c.M0 + 1.0));
  if (!(c.K > 8.0)) {
    std::ostringstream os;
    os << "composite constant K = " << c.K << " is not > 8";
    throw Error(ErrorKind::Certification, os.str());
  }
  const auto origin = flat.chart->to_computational(0.0, 0.0);
  c.xi1_bar = conj.h.interpolate((*origin)[0], (*origin)[1]);
  const int stride_s = std::max(1, (grid.nx - 1) / 48), stride_t = std::max(1, (grid.ny - 1) / 48);
  for (int j = 0; j < grid.ny; j += stride_t)
    for (int i = 0; i < grid.nx; i += stride_s)
      fields->seeds.push_back({conj.h.at(i, j), flat.k.at(i, j), grid.x(i), grid.y(j)});
  fields->h_range = std::max(conj.b - conj.a, 1e-300);
  map.fields_ = fields;

  // Residuals of the conjugate pair.
  const auto [hx1, hx2] = physical_gradient(conj.h);
  // The core |x1| <= 3 r0/4 contains Phi([-1, 1] x [0, 1]) since |Phi(y)| <= (r0/2)|y|.
  double cr1 = 0.0, cr2 = 0.0, full1 = 0.0, full2 = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t n = grid.index(i, j);
      const double e1 = std::abs(hx1.values()[n] - fields->kx2.values()[n]);
      const double e2 = std::abs(hx2.values()[n] + fields->kx1.values()[n]);
      full1 = std::max(full1, e1);
      full2 = std::max(full2, e2);
      if (std::abs(flat.chart->to_physical(grid.x(i), grid.y(j))[0]) > 0.75 * c.r0) continue;
      cr1 = std::max(cr1, e1);
      cr2 = std::max(cr2, e2);
    }
  c.cauchy_riemann = cr1 + cr2;
  c.cauchy_riemann_closure = full1 + full2;
  c.harmonic_residual = flat.discrete_residual;
  c.stencil_laplacian = flat.stencil_laplacian;
  c.loop_closure = conj.loop_closure;
  c.lateral_variation = conj.lateral_variation;
  c.graph_min_step = conj.graph_min_step;

  // Probe sweep over [-1, 1] x [0, 1].
  const Grid2D probes(-1.0, 1.0, 0.0, 1.0, options.probe_nx, options.probe_ny);
  struct ProbeResult {
    double grad = 0, inv = 0, phi_growth = 0, inv_growth = 0, det = 0, round = 0, offset = 0, x1 = 0;
  };
  std::vector<ProbeResult> pr(probes.size());
  parallel_for(static_cast<int>(probes.size()), [&](int n) {
    const int i = n % probes.nx, j = n / probes.nx;
    const Vec2 y{probes.x(i), probes.y(j)};
    const Vec2 x = map.forward(y);
    const Mat2 D = map.differential(y);
    const Mat2 Di = map.inverse_differential(x);
    ProbeResult& p = pr[static_cast<std::size_t>(n)];
    p.grad = frobenius(D);
    p.inv = frobenius(Di);
    p.det = D[0] * D[3] - D[1] * D[2];
    const auto back = map.inverse(x);
    if (!back) throw Error(ErrorKind::NonInjective, "probe image left the extended domain");
    p.round = std::hypot((*back)[0] - y[0], (*back)[1] - y[1]);
    const double ny_ = std::hypot(y[0], y[1]), nx_ = std::hypot(x[0], x[1]);
    if (ny_ > 0.0) p.phi_growth = nx_ / (0.5 * c.r0 * ny_);
    if (nx_ > 0.0) p.inv_growth = std::hypot((*back)[0], (*back)[1]) / (c.K / c.r0 * nx_);
    if (j == 0) p.offset = std::abs(x[1] - map.boundary()(x[0]));
    p.x1 = std::abs(x[0]);
  });
  c.probes = static_cast<int>(probes.size());
  c.grad_phi_min = c.grad_inv_min = c.det_min = std::numeric_limits<double>::infinity();
  for (const auto& p : pr) {
    c.grad_phi_min = std::min(c.grad_phi_min, p.grad);
    c.grad_phi_max = std::max(c.grad_phi_max, p.grad);
    c.grad_inv_min = std::min(c.grad_inv_min, p.inv);
    c.grad_inv_max = std::max(c.grad_inv_max, p.inv);
    c.phi_growth = std::max(c.phi_growth, p.phi_growth);
    c.inv_growth = std::max(c.inv_growth, p.inv_growth);
    c.det_min = std::min(c.det_min, p.det);
    c.round_trip = std::max(c.round_trip, p.round);
    c.boundary_offset = std::max(c.boundary_offset, p.offset);
    c.image_max_x1 = std::max(c.image_max_x1, p.x1);
  }
  const Vec2 o = map.forward({0.0, 0.0});
  c.origin_error = std::hypot(o[0], o[1]);

  const double up = 1.0 + options.slack, lo = 1.0 - options.slack;
  auto check = [&](const std::string& name, bool pass) { c.checks.push_back({name, pass}); };
  check("0 < k < 1 in the interior", flat.interior_min > 0.0 && flat.interior_max < 1.0);
  check("4 c0 <= b - a <= 4 C0", c.b - c.a >= 4.0 * c.c0 * lo && c.b - c.a <= 4.0 * c.C0 * up);
  check("c0 r0/(2 C0) <= |D Phi| <= r0/2",
        c.grad_phi_min >= c.c0 * c.r0 / (2.0 * c.C0) * lo && c.grad_phi_max <= 0.5 * c.r0 * up);
  check("4/r0 <= |D Phi^-1| <= 4 C0/(c0 r0)",
        c.grad_inv_min >= 4.0 / c.r0 * lo && c.grad_inv_max <= 4.0 * c.C0 / (c.c0 * c.r0) * up);
  check("|Phi(y)| <= (r0/2)|y|", c.phi_growth <= up);
  check("|Phi^-1(x)| <= (K/r0)|x|", c.inv_growth <= up);
  check("Phi(0, 0) = (0, 0)", c.origin_error <= 1e-10);
  check("Phi(probes) inside the box |x1| < r0", c.image_max_x1 < c.r0);
  check("h increasing along the graph", c.graph_min_step > 0.0);
  check("det D Phi > 0", c.det_min > 0.0);
  check("round trip <= 1e-8", c.round_trip <= 1e-8);
  check("K > 8", c.K > 8.0);
  c.certified = true;
  for (const auto& ch : c.checks) c.certified = c.certified && ch.pass;
  return map;
}

nlohmann::json MapCertificate::to_json() const {
  nlohmann::json j;
  j["a"] = a;
  j["b"] = b;
  j["xi1_bar"] = xi1_bar;
  j["c0"] = c0;
  j["C0"] = C0;
  j["K"] = K;
  j["r0"] = r0;
  j["M0"] = M0;
  j["min_r0_kx2"] = min_kx2;
  j["mesh"] = {mesh_nx, mesh_ny};
  j["residuals"] = {{"cauchy_riemann", cauchy_riemann},
                      {"cauchy_riemann_closure", cauchy_riemann_closure},
                    {"harmonic_discrete", harmonic_residual},
                    {"harmonic_stencil", stencil_laplacian},
                    {"loop_closure", loop_closure},
                    {"lateral_variation", lateral_variation},
                    {"origin", origin_error},
                    {"boundary_offset", boundary_offset},
                    {"round_trip", round_trip}};
  j["bounds"] = {{"grad_phi", {grad_phi_min, grad_phi_max}},
                 {"grad_phi_inverse", {grad_inv_min, grad_inv_max}},
                 {"phi_growth", phi_growth},
                 {"inverse_growth", inv_growth},
                 {"det_min", det_min},
                 {"image_max_x1", image_max_x1},
                 {"graph_min_step", graph_min_step}};
  j["probes"] = probes;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}});
  j["checks"] = cs;
  j["certified"] = certified;
  return j;
}

ConformalMap build_conformal_map(const BoundaryGraph& graph, const ConformalOptions& options) {
  const ExtendedGraph ext = extend_boundary(graph);
  const FlatteningResult flat = solve_flattening_bvp(ext, options.flattening);
  const ConjugateResult conj = harmonic_conjugate(flat, options.loop_tolerance);
  return ConformalMap::assemble(flat, conj, options.certify);
}

std::optional<Vec2> ConformalChart::to_computational(double x, double y) const {
  const auto p = map_->inverse({x, y});
  if (!p) return std::nullopt;
  const double e = 1e-9;
  if ((*p)[0] < -1.0 - e || (*p)[0] > 1.0 + e || (*p)[1] < -e || (*p)[1] > 1.0 + e) return std::nullopt;
  return p;
}

Mat2 ConformalChart::inverse_jacobian(double s, double t) const {
  return map_->inverse_differential(map_->forward({s, t}));
}

namespace {

// sum over |beta| <= order of sup |D^beta f|.
double ck_norm(const ScalarField& f, int order) {
  double total = 0.0;
  for (int o = 0; o <= order; ++o)
    for (int px = 0; px <= o; ++px) total += f.derivative(px, o - px).max_abs();
  return total;
}

}  // namespace

PulledBackCoefficients pullback_coefficients(const ConformalMap& map, const PlateMaterial& material,
                                             const Grid2D& flat_grid) {
  if (!map.certified()) throw Error(ErrorKind::Precondition, "conformal map is not certified");
  const Grid2D& g = flat_grid;
  std::array<std::vector<double>, 8> v;
  for (auto& a : v) a.assign(g.size(), 0.0);
  const bool constant = material.is_constant();
  parallel_for(g.ny, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 x = map.forward({g.x(i), g.y(j)});
      const auto [d1, d2] = map.derivatives(x);
      const double Ji = std::norm(d1), J = 1.0 / Ji;
      const std::complex<double> wp = d2 / d1;
      const std::complex<double> cw = std::conj(d1) * wp;
      const double gJ1 = 2.0 * cw.real(), gJ2 = -2.0 * cw.imag();
      const double lapJi = 4.0 * std::norm(wp);
      double at1 = 0.0, at2 = 0.0, q[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
      if (!constant) {
        const auto s = material.at(x[0], x[1]);
        at1 = s.a1;
        at2 = s.a2;
        q[0][0] = s.q11;
        q[0][1] = q[1][0] = s.q12;
        q[1][1] = s.q22;
      }
      const double Fa1 = d1.real() * at1 - d1.imag() * at2, Fa2 = d1.imag() * at1 + d1.real() * at2;
      const double cl = J * J * (Fa1 * gJ1 + Fa2 * gJ2) - J * lapJi;
      // First and second derivatives of F = (U, V) with respect to x.
      const double F1[2][2] = {{d1.real(), -d1.imag()}, {d1.imag(), d1.real()}};
      const double F2[2][2][2] = {{{d2.real(), -d2.imag()}, {-d2.imag(), -d2.real()}},
                                  {{d2.imag(), d2.real()}, {d2.real(), -d2.imag()}}};
      double ckl[2][2] = {{cl, 0.0}, {0.0, cl}}, ck[2] = {0.0, 0.0};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          if (q[a][b] == 0.0) continue;
          for (int kk = 0; kk < 2; ++kk) {
            ck[kk] += J * J * q[a][b] * F2[kk][a][b];
            for (int l = 0; l < 2; ++l) ckl[kk][l] += J * J * q[a][b] * F1[kk][a] * F1[l][b];
          }
        }
      const std::size_t n = g.index(i, j);
      v[0][n] = J * (Fa1 - 2.0 * gJ1);
      v[1][n] = J * (Fa2 - 2.0 * gJ2);
      v[2][n] = ckl[0][0];
      v[3][n] = 0.5 * (ckl[0][1] + ckl[1][0]);
      v[4][n] = ckl[1][1];
      v[5][n] = ck[0];
      v[6][n] = ck[1];
      v[7][n] = J;
    }
  });
  PulledBackCoefficients out;
  out.coeffs.a1 = ScalarField(g, v[0]);
  out.coeffs.a2 = ScalarField(g, v[1]);
  out.coeffs.c11 = ScalarField(g, v[2]);
  out.coeffs.c12 = ScalarField(g, v[3]);
  out.coeffs.c22 = ScalarField(g, v[4]);
  out.coeffs.c1 = ScalarField(g, v[5]);
  out.coeffs.c2 = ScalarField(g, v[6]);
  out.J = ScalarField(g, v[7]);
  for (std::size_t n = 0; n < g.size(); ++n) out.a_sup = std::max(out.a_sup, std::hypot(v[0][n], v[1][n]));
  for (const ScalarField* f : {&out.coeffs.c11, &out.coeffs.c12, &out.coeffs.c22, &out.coeffs.c1, &out.coeffs.c2}) {
    out.c_sup = std::max(out.c_sup, f->max_abs());
    out.c_c2 = std::max(out.c_c2, ck_norm(*f, 2));
  }
  out.a_c3 = ck_norm(out.coeffs.a1, 3) + ck_norm(out.coeffs.a2, 3);
  out.M1 = std::max(out.a_c3, out.c_c2);
  return out;
}

PullbackResult pullback(const ScalarField& v, const ConformalMap& map, const PlateMaterial& material,
                        const Grid2D& flat_grid) {
  if (!map.certified()) throw Error(ErrorKind::Precondition, "conformal map is not certified");
  const Grid2D& g = flat_grid;
  std::vector<double> u(g.size());
  parallel_for(g.ny, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 x = map.forward({g.x(i), g.y(j)});
      const auto value = v.evaluate(x[0], x[1]);
      if (!value) {
        std::ostringstream os;
        os << "Phi(" << g.x(i) << ", " << g.y(j) << ") = (" << x[0] << ", " << x[1]
           << ") lies outside the field's domain";
        throw Error(ErrorKind::Extrapolation, os.str());
      }
      u[g.index(i, j)] = *value;
    }
  });
  PullbackResult out;
  out.u = ScalarField(g, std::move(u));
  out.coefficients = pullback_coefficients(map, material, g);
  const ScalarField uy = out.u.derivative(0, 1);
  for (int i = 0; i < g.nx; ++i) {
    out.trace_u = std::max(out.trace_u, std::abs(out.u.at(i, 0)));
    out.trace_uy = std::max(out.trace_uy, std::abs(uy.at(i, 0)));
  }
  return out;
}

}  // namespace ucp
