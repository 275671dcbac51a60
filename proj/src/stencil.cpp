#include "ucp/stencil.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "ucp/error.hpp"

namespace ucp {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Fornberg's recursion for derivative order p at 0, exact.
std::vector<cpp_rational> fornberg_exact(const std::vector<int>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<cpp_rational>> c(static_cast<std::size_t>(n),
                                           std::vector<cpp_rational>(static_cast<std::size_t>(m + 1)));
  cpp_rational c1 = 1, c4 = x[0];
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    cpp_rational c2 = 1;
    const cpp_rational c5 = c4;
    c4 = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const cpp_rational c3 = cpp_rational(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
      c2 *= c3;
      auto& ci = c[static_cast<std::size_t>(i)];
      const auto& cim = c[static_cast<std::size_t>(i - 1)];
      auto& cj = c[static_cast<std::size_t>(j)];
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          ci[static_cast<std::size_t>(k)] =
              c1 * (cpp_rational(k) * cim[static_cast<std::size_t>(k - 1)] - c5 * cim[static_cast<std::size_t>(k)]) / c2;
        ci[0] = -c1 * c5 * cim[0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        cj[static_cast<std::size_t>(k)] =
            (c4 * cj[static_cast<std::size_t>(k)] - cpp_rational(k) * cj[static_cast<std::size_t>(k - 1)]) / c3;
      cj[0] = c4 * cj[0] / c3;
    }
    c1 = c2;
  }
  std::vector<cpp_rational> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
  return w;
}

Stencil make_stencil(int start, int width, int node, int p) {
  std::vector<int> offsets(static_cast<std::size_t>(width));
  for (int k = 0; k < width; ++k) offsets[static_cast<std::size_t>(k)] = start + k - node;
  const auto w = fornberg_exact(offsets, p);
  cpp_int lcm = 1;
  for (const auto& v : w) {
    const cpp_int d = boost::multiprecision::denominator(v);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  Stencil s;
  s.start = start;
  s.denominator = lcm.convert_to<double>();
  for (const auto& v : w) {
    const cpp_int num = boost::multiprecision::numerator(v) * (lcm / boost::multiprecision::denominator(v));
    if (boost::multiprecision::abs(num) > (cpp_int(1) << 53))
      throw Error(ErrorKind::InvalidInput, "stencil numerator exceeds exact double range");
    s.numerator.push_back(num.convert_to<double>());
  }
  return s;
}

}  // namespace

std::vector<double> fornberg_weights(const std::vector<int>& offsets, int p, double z) {
  const int n = static_cast<int>(offsets.size());
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(p + 1), 0.0));
  double c1 = 1.0, c4 = offsets[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, p);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[static_cast<std::size_t>(i)] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[static_cast<std::size_t>(i)] - offsets[static_cast<std::size_t>(j)];
      c2 *= c3;
      auto& ci = c[static_cast<std::size_t>(i)];
      const auto& cim = c[static_cast<std::size_t>(i - 1)];
      auto& cj = c[static_cast<std::size_t>(j)];
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          ci[static_cast<std::size_t>(k)] = c1 * (k * cim[static_cast<std::size_t>(k - 1)] - c5 * cim[static_cast<std::size_t>(k)]) / c2;
        ci[0] = -c1 * c5 * cim[0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        cj[static_cast<std::size_t>(k)] = (c4 * cj[static_cast<std::size_t>(k)] - k * cj[static_cast<std::size_t>(k - 1)]) / c3;
      cj[0] = c4 * cj[0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(p)];
  return w;
}

StencilTable::StencilTable(int n, int p, int q) : p_(p) {
  if (n < 1 || p < 0 || q < 1) throw Error(ErrorKind::InvalidInput, "bad stencil request");
  stencils_.resize(static_cast<std::size_t>(n));
  if (p == 0) {
    margin_ = 0;
    for (int i = 0; i < n; ++i) stencils_[static_cast<std::size_t>(i)] = Stencil{i, {1.0}, 1.0};
    return;
  }
  const int half = (p % 2 == 1) ? (q + p) / 2 : (q + p - 1) / 2;  // ceil((q+p-1)/2), ceil((q+p-2)/2)
  int one_sided = std::min(p + q, n);
  if (one_sided <= p) throw Error(ErrorKind::InvalidInput, "grid too small for derivative order");
  margin_ = half;
  if (2 * half + 1 > n) margin_ = n;  // no centered stencil fits
  std::map<int, Stencil> cache;       // keyed by start - i
  for (int i = 0; i < n; ++i) {
    int start = 0, width = 0;
    if (i >= margin_ && i + margin_ < n) {
      start = i - half;
      width = 2 * half + 1;
    } else {
      width = one_sided;
      start = std::clamp(i - width / 2, 0, n - width);
    }
    const int key = (start - i) * 64 + width;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_stencil(start, width, i, p)).first;
    Stencil s = it->second;
    s.start = start;
    stencils_[static_cast<std::size_t>(i)] = std::move(s);
  }
}

void StencilTable::apply(const double* f, std::ptrdiff_t stride, double h, double* out,
                         std::ptrdiff_t out_stride) const {
  const int n = size();
  if (p_ == 0) {
    for (int i = 0; i < n; ++i) out[i * out_stride] = f[i * stride];
    return;
  }
  const double scale = 1.0 / std::pow(h, p_);
  for (int i = 0; i < n; ++i) {
    const Stencil& s = stencils_[static_cast<std::size_t>(i)];
    const double fi = f[i * stride];
    double acc = 0.0;
    for (std::size_t k = 0; k < s.numerator.size(); ++k)
      acc += s.numerator[k] * (f[(s.start + static_cast<int>(k)) * stride] - fi);
    out[i * out_stride] = acc / s.denominator * scale;
  }
}

const StencilTable& stencil_table(int n, int p, int q) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<StencilTable>> tables;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = tables[{n, p, q}];
  if (!slot) slot = std::make_unique<StencilTable>(n, p, q);
  return *slot;
}

}  // namespace ucp
