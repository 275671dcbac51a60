#pragma once

// Truncated Taylor arithmetic in one and two variables. Coefficients are
// normalized: c_k = f^(k)(x0)/k! and c_ij = d^i_x d^j_y f(x0,y0)/(i! j!).

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace ucp {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

template <int N>
class Taylor1 {
 public:
  static constexpr int order = N;
  std::array<double, N + 1> c{};

  Taylor1() = default;
  Taylor1(double v) { c[0] = v; }  // NOLINT: constants promote implicitly

  static Taylor1 variable(double x0) {
    Taylor1 t(x0);
    if constexpr (N > 0) t.c[1] = 1.0;
    return t;
  }

  double value() const { return c[0]; }
  double derivative(int k) const { return k > N ? 0.0 : c[k] * factorial(k); }

  Taylor1& operator+=(const Taylor1& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Taylor1& operator-=(const Taylor1& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Taylor1& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Taylor1 operator-() const {
    Taylor1 r = *this;
    r *= -1.0;
    return r;
  }
  friend Taylor1 operator*(const Taylor1& a, const Taylor1& b) {
    Taylor1 r;
    for (int i = 0; i <= N; ++i) {
      if (a.c[i] == 0.0) continue;
      for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
  }
};

template <int N>
class Taylor2 {
 public:
  static constexpr int order = N;
  static constexpr int stride = N + 1;
  std::array<double, (N + 1) * (N + 1)> c{};

  Taylor2() = default;
  Taylor2(double v) { c[0] = v; }  // NOLINT: constants promote implicitly

  static Taylor2 variable_x(double x0) {
    Taylor2 t(x0);
    if constexpr (N > 0) t.c[stride] = 1.0;
    return t;
  }
  static Taylor2 variable_y(double y0) {
    Taylor2 t(y0);
    if constexpr (N > 0) t.c[1] = 1.0;
    return t;
  }

  double value() const { return c[0]; }
  double coeff(int i, int j) const { return i + j > N ? 0.0 : c[i * stride + j]; }
  double& coeff(int i, int j) { return c[i * stride + j]; }
  double derivative(int i, int j) const { return coeff(i, j) * factorial(i) * factorial(j); }

  Taylor2& operator+=(const Taylor2& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
  }
  Taylor2& operator-=(const Taylor2& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k];
    return *this;
  }
  Taylor2& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Taylor2 operator-() const {
    Taylor2 r = *this;
    r *= -1.0;
    return r;
  }
  friend Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
    Taylor2 r;
    for (int i1 = 0; i1 <= N; ++i1) {
      for (int j1 = 0; i1 + j1 <= N; ++j1) {
        const double av = a.c[i1 * stride + j1];
        if (av == 0.0) continue;
        const int rem = N - i1 - j1;
        for (int i2 = 0; i2 <= rem; ++i2) {
          for (int j2 = 0; i2 + j2 <= rem; ++j2) {
            r.c[(i1 + i2) * stride + j1 + j2] += av * b.c[i2 * stride + j2];
          }
        }
      }
    }
    return r;
  }
};

template <class T>
struct is_jet : std::false_type {};
template <int N>
struct is_jet<Taylor1<N>> : std::true_type {};
template <int N>
struct is_jet<Taylor2<N>> : std::true_type {};

template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator+(J a, const J& b) {
  a += b;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator-(J a, const J& b) {
  a -= b;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator+(J a, double s) {
  a.c[0] += s;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator+(double s, J a) {
  a.c[0] += s;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator-(J a, double s) {
  a.c[0] -= s;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator-(double s, const J& a) {
  J r = -a;
  r.c[0] += s;
  return r;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator*(J a, double s) {
  a *= s;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator*(double s, J a) {
  a *= s;
  return a;
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator/(J a, double s) {
  a *= 1.0 / s;
  return a;
}

inline double value_of(double x) { return x; }
template <class J, class = std::enable_if_t<is_jet<J>::value>>
double value_of(const J& x) {
  return x.value();
}

// Series d_k of f(a0 + e) = sum d_k e^k.
template <int N>
using Series = std::array<double, N + 1>;

// Evaluates sum d_k (a - a0)^k by Horner; the increment has zero constant term.
template <class J>
J compose(const Series<J::order>& d, const J& a) {
  J delta = a;
  delta.c[0] = 0.0;
  J r(d[J::order]);
  for (int k = J::order - 1; k >= 0; --k) {
    r = r * delta;
    r.c[0] += d[k];
  }
  return r;
}

template <int N>
Series<N> series_exp(double a0) {
  Series<N> d{};
  const double e = std::exp(a0);
  for (int k = 0; k <= N; ++k) d[k] = e / factorial(k);
  return d;
}

template <int N>
Series<N> series_log(double a0) {
  Series<N> d{};
  if (!(a0 > 0.0)) {
    d.fill(std::numeric_limits<double>::quiet_NaN());
    return d;
  }
  d[0] = std::log(a0);
  double p = 1.0;
  for (int k = 1; k <= N; ++k) {
    p /= a0;
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
  }
  return d;
}

template <int N>
Series<N> series_sin(double a0) {
  Series<N> d{};
  const double s = std::sin(a0), co = std::cos(a0);
  const double cyc[4] = {s, co, -s, -co};
  for (int k = 0; k <= N; ++k) d[k] = cyc[k % 4] / factorial(k);
  return d;
}

template <int N>
Series<N> series_cos(double a0) {
  Series<N> d{};
  const double s = std::sin(a0), co = std::cos(a0);
  const double cyc[4] = {co, -s, -co, s};
  for (int k = 0; k <= N; ++k) d[k] = cyc[k % 4] / factorial(k);
  return d;
}

// Generalized binomial series of x^p at a0 > 0.
template <int N>
Series<N> series_pow(double a0, double p) {
  Series<N> d{};
  if (!(a0 > 0.0)) {
    d.fill(std::numeric_limits<double>::quiet_NaN());
    if (a0 == 0.0 && p > 0.0) d[0] = 0.0;
    return d;
  }
  double binom = 1.0;
  for (int k = 0; k <= N; ++k) {
    d[k] = binom * std::pow(a0, p - k);
    binom *= (p - k) / (k + 1);
  }
  return d;
}

template <int N>
Series<N> series_recip(double a0) {
  Series<N> d{};
  double p = 1.0 / a0;
  for (int k = 0; k <= N; ++k) {
    d[k] = ((k % 2 == 0) ? 1.0 : -1.0) * p;
    p /= a0;
  }
  return d;
}

template <int N>
Series<N> series_atan(double a0) {
  Series<N> d{};
  d[0] = std::atan(a0);
  if constexpr (N > 0) {
    const auto x = Taylor1<N - 1>::variable(a0);
    const auto q = compose(series_recip<N - 1>(1.0 + a0 * a0), 1.0 + x * x);
    for (int k = 1; k <= N; ++k) d[k] = q.c[k - 1] / k;
  }
  return d;
}

// tanh' = 1 - tanh^2, integrated order by order.
template <int N>
Series<N> series_tanh(double a0) {
  Series<N> d{};
  d[0] = std::tanh(a0);
  for (int k = 0; k < N; ++k) {
    double sq = 0.0;
    for (int i = 0; i <= k; ++i) sq += d[i] * d[k - i];
    d[k + 1] = ((k == 0 ? 1.0 : 0.0) - sq) / (k + 1);
  }
  return d;
}

template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator/(const J& a, const J& b) {
  return a * compose(series_recip<J::order>(b.value()), b);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J operator/(double s, const J& b) {
  return s * compose(series_recip<J::order>(b.value()), b);
}

template <class J, class = std::enable_if_t<is_jet<J>::value>>
J exp(const J& a) {
  return compose(series_exp<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J log(const J& a) {
  return compose(series_log<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J sin(const J& a) {
  return compose(series_sin<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J cos(const J& a) {
  return compose(series_cos<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J tan(const J& a) {
  return sin(a) / cos(a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J atan(const J& a) {
  return compose(series_atan<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J tanh(const J& a) {
  return compose(series_tanh<J::order>(a.value()), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J sinh(const J& a) {
  return 0.5 * (exp(a) - exp(-a));
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J cosh(const J& a) {
  return 0.5 * (exp(a) + exp(-a));
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J sqrt(const J& a) {
  return compose(series_pow<J::order>(a.value(), 0.5), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J abs(const J& a) {
  return a.value() < 0.0 ? -a : a;
}

template <class T>
T ipow(const T& a, int n) {
  if (n < 0) return T(1.0) / ipow(a, -n);
  T result(1.0);
  T base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

template <class J, class = std::enable_if_t<is_jet<J>::value>>
J pow(const J& a, double p) {
  if (p == std::floor(p) && std::abs(p) <= 64.0) return ipow(a, static_cast<int>(p));
  return compose(series_pow<J::order>(a.value(), p), a);
}
template <class J, class = std::enable_if_t<is_jet<J>::value>>
J pow(const J& a, const J& b) {
  return exp(b * log(a));
}

// exp(-1/t) mollifier profile, identically zero for t <= 0.
template <class T>
T mollifier(const T& t) {
  using std::exp;
  if (value_of(t) <= 0.0) return T(0.0);
  return exp(-1.0 / t);
}

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
template <class T>
T bridge(const T& t) {
  if (value_of(t) <= 0.0) return T(0.0);
  if (value_of(t) >= 1.0) return T(1.0);
  const T a = mollifier(t);
  const T b = mollifier(1.0 - t);
  return a / (a + b);
}

// Compactly supported bump exp(-1/(t(1-t))) on (0,1).
template <class T>
T bump(const T& t) {
  using std::exp;
  if (value_of(t) <= 0.0 || value_of(t) >= 1.0) return T(0.0);
  return exp(-1.0 / (t * (1.0 - t)));
}

}  // namespace ucp
