#pragma once

// Finite-difference weights computed in exact rational arithmetic and stored
// as integer numerators over a common denominator. Applying them to
// differences f_k - f_i keeps polynomial data exact on dyadic grids.

#include <vector>

namespace ucp {

struct Stencil {
  int start = 0;                  // first node index of the window
  std::vector<double> numerator;  // integer-valued
  double denominator = 1.0;       // integer-valued, weights = numerator/denominator/h^p
};

class StencilTable {
 public:
  StencilTable(int n, int derivative, int accuracy);

  const Stencil& at(int i) const { return stencils_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(stencils_.size()); }
  int derivative() const { return p_; }
  // Nodes at distance >= margin from both ends use the centered stencil.
  int centered_margin() const { return margin_; }

  // out[i*stride] = d^p f / dx^p at node i, spacing h.
  void apply(const double* f, std::ptrdiff_t stride, double h, double* out,
             std::ptrdiff_t out_stride) const;

 private:
  int p_;
  int margin_;
  std::vector<Stencil> stencils_;
};

// Cached table for n nodes, derivative order p, accuracy order q.
const StencilTable& stencil_table(int n, int p, int q);

// Weights (as doubles) for derivative p at offset z given integer node offsets.
std::vector<double> fornberg_weights(const std::vector<int>& offsets, int p, double z = 0.0);

}  // namespace ucp
