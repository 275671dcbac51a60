#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ucp/geometry.hpp"
#include "ucp/material.hpp"
#include "ucp/plate.hpp"
#include "ucp/scalar_field.hpp"
#include "ucp/sparse_solve.hpp"

namespace ucp {

// Boundary-fitted chart of {(x1, x2) : |x1| <= w, G(x1) <= x2 <= H}:
// x1 = w s, x2 = G(x1) + t (H - G(x1)), (s, t) in [-1, 1] x [0, 1].
class TransfiniteChart : public Chart {
 public:
  TransfiniteChart(UnivariateFunction bottom, double half_width, double top);

  Vec2 to_physical(double s, double t) const override;
  std::optional<Vec2> to_computational(double x, double y) const override;
  Mat2 inverse_jacobian(double s, double t) const override;

  double half_width() const { return w_; }
  double top() const { return H_; }
  const UnivariateFunction& bottom() const { return g_; }

 private:
  UnivariateFunction g_;
  double w_;
  double H_;
};

struct FlatteningOptions {
  int nx = 129;
  int ny = 129;
  SolverOptions solver{};
};

// Harmonic potential k on the extended domain: k = 0 on the graph, k = 1 on
// top, k_x1 = 0 on the lateral sides.
struct FlatteningResult {
  ScalarField k;  // on the chart's computational grid
  std::shared_ptr<const TransfiniteChart> chart;
  ExtendedGraph graph;
  LinearSolveReport linear;
  double discrete_residual = 0.0;  // max |L_h k| over interior nodes
  double stencil_laplacian = 0.0;  // max |lap k| from 4th-order differences
  double trace_graph = 0.0;        // max |k| on the graph
  double trace_top = 0.0;          // max |k - 1| on top
  double interior_min = 0.0;
  double interior_max = 0.0;
};

// Throws Solver on a singular system and Certification when interior values leave (0, 1).
FlatteningResult solve_flattening_bvp(const ExtendedGraph& graph, const FlatteningOptions& options = {});

struct ConjugateResult {
  ScalarField h;                  // anchored by h(-2 r0, 0) = 0
  double a = 0.0;                 // h on the left side
  double b = 0.0;                 // h at the bottom-right corner
  double loop_closure = 0.0;      // |h(top-right) via top - via right side|
  double lateral_variation = 0.0; // max |h - a| on the left, |h - b| on the right
  double graph_min_step = 0.0;    // min difference of h between graph nodes
};

// Path integration of (k_x2, -k_x1): along the graph, then up each column.
// Throws NonExactness when loop_closure > tolerance * (b - a).
ConjugateResult harmonic_conjugate(const FlatteningResult& flat, double tolerance = 1e-3);

struct MapCertificate {
  double a = 0.0, b = 0.0, xi1_bar = 0.0;
  double c0 = 0.0, C0 = 0.0, K = 0.0;
  double r0 = 0.0, M0 = 0.0;
  double min_kx2 = 0.0;               // min r0 k_x2 over the nodes
  double cauchy_riemann = 0.0;        // max|h_x1 - k_x2| + max|h_x2 + k_x1| on the core |x1| <= 3 r0/4
  double cauchy_riemann_closure = 0.0;  // same over the whole extended domain
  double harmonic_residual = 0.0;     // discrete
  double stencil_laplacian = 0.0;
  double loop_closure = 0.0;
  double lateral_variation = 0.0;
  double graph_min_step = 0.0;
  double origin_error = 0.0;          // |Phi(0, 0)|
  double boundary_offset = 0.0;       // max |x2 - g(x1)| on Phi([-1, 1] x {0})
  double round_trip = 0.0;            // max |Phi^{-1}(Phi(y)) - y|
  double grad_phi_min = 0.0, grad_phi_max = 0.0;
  double grad_inv_min = 0.0, grad_inv_max = 0.0;
  double phi_growth = 0.0;            // max |Phi(y)| / ((r0/2)|y|)
  double inv_growth = 0.0;            // max |Phi^{-1}(x)| / ((K/r0)|x|)
  double det_min = 0.0;
  double image_max_x1 = 0.0;          // max |x1| over Phi(probes), must be < r0
  int probes = 0;
  int mesh_nx = 0, mesh_ny = 0;
  struct Check {
    std::string name;
    bool pass = false;
  };
  std::vector<Check> checks;
  bool certified = false;

  nlohmann::json to_json() const;
};

struct CertifyOptions {
  int probe_nx = 41;
  int probe_ny = 21;
  double slack = 1e-6;  // relative slack on the map bounds
};

// Phi = (Theta o Psi)^{-1} with Psi = h + i k and Theta(xi) = (2 sqrt2/c0)(xi1 - xi1_bar, xi2).
class ConformalMap {
 public:
  // Throws NonInjective when a probe cannot be inverted and Certification when K <= 8.
  static ConformalMap assemble(const FlatteningResult& flat, const ConjugateResult& conj,
                               const CertifyOptions& options = {});

  Vec2 psi(Vec2 x) const;  // physical point -> (h, k)
  Vec2 theta(Vec2 xi) const;
  Vec2 theta_inverse(Vec2 y) const;
  Vec2 forward(Vec2 y) const;  // Phi; throws NonInjective on Newton failure
  std::optional<Vec2> inverse(Vec2 x) const;  // Phi^{-1}; empty outside the extended domain
  Mat2 differential(Vec2 y) const;            // D Phi (y)
  Mat2 inverse_differential(Vec2 x) const;    // D Phi^{-1} (x)

  // F = Theta o Psi as a holomorphic function of x1 + i x2: F'(x), F''(x).
  std::pair<std::complex<double>, std::complex<double>> derivatives(Vec2 x) const;

  const MapCertificate& certificate() const { return cert_; }
  bool certified() const { return cert_.certified; }
  double scale() const;  // 2 sqrt2 / c0
  const FlatteningResult& flattening() const { return *flat_; }
  const ScalarField& h() const { return conj_->h; }
  const UnivariateFunction& boundary() const { return flat_->graph.parent.g; }

 private:
  struct Fields;
  ConformalMap() = default;
  Vec2 solve_psi(Vec2 xi) const;  // computational point (s, t) with Psi = xi
  std::array<double, 2> gradient_k(double s, double t) const;

  std::shared_ptr<const FlatteningResult> flat_;
  std::shared_ptr<const ConjugateResult> conj_;
  std::shared_ptr<const Fields> fields_;
  MapCertificate cert_;
};

struct ConformalOptions {
  FlatteningOptions flattening{};
  double loop_tolerance = 1e-3;
  CertifyOptions certify{};
};

// extend_boundary -> solve_flattening_bvp -> harmonic_conjugate -> assemble.
ConformalMap build_conformal_map(const BoundaryGraph& graph, const ConformalOptions& options = {});

// Chart whose computational square is [-1, 1] x [0, 1] with physical image Phi(square).
class ConformalChart : public Chart {
 public:
  explicit ConformalChart(std::shared_ptr<const ConformalMap> map) : map_(std::move(map)) {}
  Vec2 to_physical(double s, double t) const override { return map_->forward({s, t}); }
  std::optional<Vec2> to_computational(double x, double y) const override;
  Mat2 inverse_jacobian(double s, double t) const override;

 private:
  std::shared_ptr<const ConformalMap> map_;
};

// Pulled-back equation lap^2 u - a.grad lap u - sum c_kl u_kl - sum c_k u_k = J^2 f
// on the flat grid, with J = |grad phi|^2.
struct PulledBackCoefficients {
  NondivCoefficients coeffs;
  ScalarField J;
  double a_sup = 0.0;   // sup |a|
  double c_sup = 0.0;   // max over alpha of sup |c_alpha|
  double a_c3 = 0.0;    // sum over |beta| <= 3 of sup |D^beta a|
  double c_c2 = 0.0;    // max over alpha of sum over |beta| <= 2 of sup |D^beta c_alpha|
  double M1 = 0.0;      // max(a_c3, c_c2)
};

PulledBackCoefficients pullback_coefficients(const ConformalMap& map, const PlateMaterial& material,
                                             const Grid2D& flat_grid);

struct PullbackResult {
  ScalarField u;
  PulledBackCoefficients coefficients;
  double trace_u = 0.0;   // max |u(y1, 0)|
  double trace_uy = 0.0;  // max |u_y2(y1, 0)|
};

// u(y) = v(Phi(y)) on flat_grid. Throws Extrapolation when Phi(y) leaves v's domain.
PullbackResult pullback(const ScalarField& v, const ConformalMap& map, const PlateMaterial& material,
                        const Grid2D& flat_grid);

}  // namespace ucp
