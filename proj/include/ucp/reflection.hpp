#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ucp/scalar_field.hpp"

namespace ucp {

// Fields on an upper grid [x0, x1] x [0, Y] are reflected onto the mirrored
// lower grid [x0, x1] x [-Y, 0]; merged fields live on [x0, x1] x [-Y, Y].

struct ReflectOptions {
  double trace_tolerance = 1e-2;  // on max|u(x, 0)|, max|u_y(x, 0)|, relative to max(1, max|u|)
};

struct ReflectedPair {
  ScalarField u;     // upper grid
  ScalarField w;     // lower grid
  ScalarField ubar;  // merged grid
  std::optional<ScalarField> F, F1, Fbar;
};

// w(x, y) = -[u(x, -y) + 2y u_y(x, -y) + y^2 lap u(x, -y)].
// Throws Precondition when the clamped traces of u exceed the tolerance.
ReflectedPair reflect_solution(const ScalarField& u, const ReflectOptions& options = {});

struct SourceExtension {
  ScalarField F1;    // lower grid
  ScalarField Fbar;  // merged grid
};

// F1(x, y) = -[5 F(x, -y) - 6y F_y(x, -y) + y^2 lap F(x, -y)].
SourceExtension extend_source(const ScalarField& F);

// Attaches F, F1 and Fbar to the pair.
ReflectedPair with_source(ReflectedPair pair, const ScalarField& F);

// Lower and merged grids of an upper grid with y_min = 0.
Grid2D lower_grid(const Grid2D& upper);
Grid2D merged_grid(const Grid2D& upper);
ScalarField merge(const ScalarField& upper, const ScalarField& lower);

struct TraceReport {
  // Traces at y = 0 of w, w_y, lap w - lap u, (lap w)_y - (lap u)_y.
  double w = 0.0, wy = 0.0, lap = 0.0, lap_y = 0.0;
  // Numerators of H at y = 0: w_yx + u_yx, -w_yy + u_yy, u_xx.
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;
  // One-sided limits across y = 0 of ubar and grad ubar.
  double value_jump = 0.0, gradient_jump = 0.0;
  double h = 0.0;
  double half_width = 0.0;  // maxima taken over |x| <= half_width

  double max_identity() const;
  nlohmann::json to_json() const;
};

// Clamped corners carry singular third derivatives; half_width keeps the
// maxima on a segment away from them.
TraceReport trace_report(const ReflectedPair& pair, double half_width = INFINITY);

struct SingularPart {
  ScalarField H;  // lower grid
  TraceReport traces;
};

struct SingularOptions {
  double numerator_tolerance = 1e-6;  // absolute, on the three numerators at y = 0
  double half_width = INFINITY;       // numerators checked on |x| <= half_width
};

// H = (6 a1/y)(w_yx + u_yx(., -y)) + (6 a2/y)(-w_yy + u_yy(., -y)) - (12 a2/y) u_xx(., -y)
// with a1, a2 on the upper grid, mirrored evenly. Within |y| < 2h the quotients use
// (N(y) - N(0))/y. Throws TraceIdentity when a numerator at y = 0 exceeds the tolerance.
SingularPart singular_part(const ReflectedPair& pair, const ScalarField& a1, const ScalarField& a2,
                           const SingularOptions& options = {});

// phi(x) = exp(-1/(1 - |x - c|^2/radius^2)) inside the disc, zero outside.
struct TestFunction {
  double cx = 0.0, cy = 0.0, radius = 0.5;
};

struct WeakFormResult {
  double max_residual = 0.0;          // max over tests of |int lap ubar lap phi - int Fbar phi| / |lap phi|_L2
  std::vector<double> residuals;
};

// Node sums over the merged grid with discrete Laplacians; Fbar empty means zero.
// Throws InvalidTest when a support reaches the unit circle or comes within
// four nodes of the grid edge.
WeakFormResult verify_weak_form(const ScalarField& ubar, const std::optional<ScalarField>& Fbar,
                                const std::vector<TestFunction>& tests);

// Same, with the source of the pair; the row y = 0 uses the mean of F and F1.
WeakFormResult verify_weak_form(const ReflectedPair& pair, const std::vector<TestFunction>& tests);

// Default battery of test discs straddling y = 0.
std::vector<TestFunction> default_test_functions();

// max |lap^2 ubar - Fbar| over merged nodes with y < 0 inside B_radius and at
// distance >= margin from the grid edges (Fbar empty means zero). Rounding in
// the nested differences grows like eps/h^6 and dominates from about 129 nodes.
double bilaplacian_residual(const ScalarField& ubar, const std::optional<ScalarField>& Fbar, double radius = 0.75,
                            int margin = 4);

}  // namespace ucp
