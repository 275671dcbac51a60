#include "ucp/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ucp/error.hpp"
#include "ucp/parallel.hpp"
#include "ucp/quadrature.hpp"
#include "ucp/taylor.hpp"

namespace ucp {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorKind::InvalidParameter, "epsilon must lie in (0, 1), got " + std::to_string(epsilon));
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

double weight_phi_quadrature(double s, double epsilon) {
  check_epsilon(epsilon);
  if (s < 0.0) throw Error(ErrorKind::OutOfRange, "weight argument must be nonnegative");
  if (s == 0.0) return 0.0;
  // t = sigma^(1/eps) turns the integrand into 1 / (eps (1 + sigma)).
  const double integral =
      integrate_adaptive([epsilon](double sigma) { return 1.0 / (epsilon * (1.0 + sigma)); }, 0.0,
                         std::pow(s, epsilon), 1e-14);
  return s * std::exp(-integral);
}

double weight_phi(double s, double epsilon) {
  check_epsilon(epsilon);
  if (s < 0.0) throw Error(ErrorKind::OutOfRange, "weight argument must be nonnegative");
  if (epsilon == 0.5) {
    const double d = 1.0 + std::sqrt(s);
    return s / (d * d);
  }
  return weight_phi_quadrature(s, epsilon);
}

double weight_rho(double x, double y, double epsilon) { return weight_phi(std::hypot(x, y), epsilon); }

nlohmann::json CarlemanWeight::to_json() const {
  return {{"epsilon", epsilon}, {"tau_bar", tau_bar}, {"R_tilde0", R_tilde0}};
}

// ---------------------------------------------------------------------------

namespace {

using Jet1 = Taylor1<4>;

Jet1 eta_jet(double r, double R0, double t) {
  const Jet1 x = Jet1::variable(t);
  const Jet1 rise = bridge((x - r / 4.0) * (4.0 / r));
  const Jet1 fall = bridge((2.0 * R0 / 3.0 - x) * (6.0 / R0));
  return rise * fall;
}

}  // namespace

std::array<double, 5> Cutoff::eta_derivatives(double t) const {
  const Jet1 j = eta_jet(r, R0, t);
  std::array<double, 5> d{};
  for (int k = 0; k <= 4; ++k) d[static_cast<std::size_t>(k)] = j.derivative(k);
  return d;
}

double Cutoff::eta(double t) const { return eta_derivatives(t)[0]; }

double Cutoff::xi(double x, double y) const { return eta(std::hypot(x, y)); }

nlohmann::json Cutoff::to_json() const {
  return {{"r", r}, {"R0", R0}, {"inner_sup", inner_sup}, {"outer_sup", outer_sup}, {"C", C}};
}

Cutoff build_cutoff(double r, double R0) {
  if (!(r > 0.0 && r < R0 / 2.0 && R0 < 1.0))
    throw Error(ErrorKind::InvalidParameter, "cutoff radii need 0 < r < R0/2 < R0 < 1");
  Cutoff c;
  c.r = r;
  c.R0 = R0;
  constexpr int kSamples = 4000;
  auto sweep = [&](double a, double b, std::array<double, 5>& sup) {
    for (int i = 0; i <= kSamples; ++i) {
      const auto d = c.eta_derivatives(a + (b - a) * i / kSamples);
      for (std::size_t k = 0; k < 5; ++k) sup[k] = std::max(sup[k], std::abs(d[k]));
    }
  };
  sweep(r / 4.0, r / 2.0, c.inner_sup);
  sweep(R0 / 2.0, 2.0 * R0 / 3.0, c.outer_sup);
  for (int k = 0; k <= 4; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    c.C = std::max({c.C, c.inner_sup[kk] * std::pow(r, k), c.outer_sup[kk] * std::pow(R0, k)});
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace {

struct WeightedNode {
  double log_rho;
  std::array<double, 4> dk;  // |D^k U|^2
  double bil;                // (lap^2 U)^2
};

std::vector<WeightedNode> carleman_nodes(const ScalarField& U, const CarlemanOptions& o) {
  check_epsilon(o.epsilon);
  if (U.chart()) throw Error(ErrorKind::Precondition, "Carleman sums need a flat grid");
  const Grid2D& g = U.grid();
  const double h = std::max(g.hx(), g.hy());
  double rmin = INFINITY, rmax = 0.0;
  int edge = std::max(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (U.at(i, j) == 0.0) continue;
      const double rr = std::hypot(g.x(i), g.y(j));
      rmin = std::min(rmin, rr);
      rmax = std::max(rmax, rr);
      edge = std::min({edge, i, j, g.nx - 1 - i, g.ny - 1 - j});
    }
  if (rmax == 0.0) return {};
  if (rmin <= o.margin * h) throw Error(ErrorKind::InvalidSupport, "support reaches the origin");
  if (rmax >= o.R_tilde0 - o.margin * h)
    throw Error(ErrorKind::InvalidSupport, "support reaches |x| = " + std::to_string(o.R_tilde0));
  if (edge < o.margin) throw Error(ErrorKind::InvalidSupport, "support reaches the grid edge");

  std::array<std::vector<ScalarField>, 4> D;
  for (int k = 0; k <= 3; ++k)
    for (int i = 0; i <= k; ++i) D[static_cast<std::size_t>(k)].push_back(k == 0 ? U : U.derivative(k - i, i));
  const ScalarField bil = U.derivative(4, 0) + 2.0 * U.derivative(2, 2) + U.derivative(0, 4);

  std::vector<WeightedNode> out;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double rr = std::hypot(g.x(i), g.y(j));
      if (rr == 0.0) continue;
      WeightedNode n{};
      bool any = false;
      for (int k = 0; k <= 3; ++k) {
        double s = 0.0;
        for (int p = 0; p <= k; ++p) {
          const double v = D[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)].at(i, j);
          s += binomial(k, p) * v * v;
        }
        n.dk[static_cast<std::size_t>(k)] = s;
        any = any || s != 0.0;
      }
      n.bil = bil.at(i, j) * bil.at(i, j);
      if (!any && n.bil == 0.0) continue;
      n.log_rho = std::log(weight_phi(rr, o.epsilon));
      out.push_back(n);
    }
  return out;
}

CarlemanResult evaluate(const std::vector<WeightedNode>& nodes, double tau, double eps, double area) {
  CarlemanResult r;
  r.tau = tau;
  for (const auto& n : nodes) {
    for (int k = 0; k <= 3; ++k)
      r.terms[static_cast<std::size_t>(k)] += std::exp((2 * k + eps - 2.0 - 2.0 * tau) * n.log_rho) *
                                               n.dk[static_cast<std::size_t>(k)];
    r.rhs += std::exp((6.0 - eps - 2.0 * tau) * n.log_rho) * n.bil;
  }
  for (int k = 0; k <= 3; ++k) {
    auto& t = r.terms[static_cast<std::size_t>(k)];
    t *= std::pow(tau, 6 - 2 * k) * area;
    r.lhs += t;
  }
  r.rhs *= area;
  if (r.rhs > 0.0) {
    r.ratio = r.lhs / r.rhs;
  } else {
    r.violation_candidate = r.lhs > 0.0;
    r.ratio = r.violation_candidate ? INFINITY : 0.0;
  }
  return r;
}

}  // namespace

std::vector<CarlemanResult> carleman_sweep(const ScalarField& U, const std::vector<double>& taus,
                                           const CarlemanOptions& options) {
  const auto nodes = carleman_nodes(U, options);
  const double area = U.grid().hx() * U.grid().hy();
  std::vector<CarlemanResult> out(taus.size());
  parallel_for(static_cast<int>(taus.size()), [&](int k) {
    out[static_cast<std::size_t>(k)] = evaluate(nodes, taus[static_cast<std::size_t>(k)], options.epsilon, area);
  });
  return out;
}

CarlemanResult carleman_ratio(const ScalarField& U, double tau, const CarlemanOptions& options) {
  return carleman_sweep(U, {tau}, options).front();
}

std::string sweep_csv(const std::vector<CarlemanResult>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "tau,lhs,rhs,ratio\n";
  for (const auto& r : rows) os << r.tau << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

// int_0^b g(t) dt through t = b exp(-x), in unit chunks until exp(-x) underflows.
// Fixed rules: the mapped integrand is smooth and adaptive bisection stalls on denormals.
double integrate_from_zero(const std::function<double(double)>& g, double b) {
  double total = 0.0;
  for (int k = 0; k < 700; ++k)
    total += integrate_panels(
        [&](double x) {
          const double t = b * std::exp(-x);
          return g(t) * t;
        },
        k, k + 1.0, 2, 20);
  return total;
}

double integrate_panels_to(const std::function<double(double)>& g, const std::vector<double>& cuts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(b - a)));
    for (int p = 0; p < n; ++p)
      total += integrate_adaptive(g, a + (b - a) * p / n, a + (b - a) * (p + 1) / n, 1e-12, 1e-18);
  }
  return total;
}

}  // namespace

HardyResult hardy_ratio(const HardyFunction& f, double T) {
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidParameter, "Hardy range must be positive");
  if (std::abs(f.f(0.0)) > 1e-12) throw Error(ErrorKind::Precondition, "Hardy ratio needs f(0) = 0");
  std::vector<double> cuts;
  for (double b : f.breakpoints)
    if (b > 0.0 && b < T) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const double first = cuts.empty() ? std::min(1.0, T) : cuts.front();
  if (cuts.empty() || cuts.front() != first) cuts.insert(cuts.begin(), first);
  cuts.push_back(T);

  const auto num = [&](double t) {
    const double q = f.f(t) / t;
    return q * q;
  };
  const auto den = [&](double t) {
    const double d = f.df(t);
    return d * d;
  };
  HardyResult r;
  r.numerator = integrate_from_zero(num, first) + integrate_panels_to(num, cuts);
  r.denominator = 4.0 * (integrate_from_zero(den, first) + integrate_panels_to(den, cuts));
  if (r.denominator > 0.0) {
    r.ratio = r.numerator / r.denominator;
  } else {
    r.ratio = r.numerator > 0.0 ? INFINITY : 0.0;
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<double> default_eps_grid() {
  std::vector<double> e;
  for (int k = 0; k <= 30; ++k) e.push_back(std::pow(10.0, -3.0 + 3.0 * k / 30.0));
  return e;
}

double derivative_norm_sq(const ScalarField& v, int k, double s) {
  if (k == 0) return region_norm(v, s);
  double total = 0.0;
  for (int p = 0; p <= k; ++p) total += binomial(k, p) * region_norm(v.derivative(k - p, p), s);
  return total;
}

double interpolation_check(const ScalarField& v, double r, int m, int j, const std::vector<double>& eps_grid) {
  if (!(0 < j && j < m)) throw Error(ErrorKind::InvalidParameter, "interpolation orders need 0 < j < m");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const double n0 = std::sqrt(region_norm(v, r));
  if (n0 == 0.0) return 0.0;
  const double nj = std::sqrt(derivative_norm_sq(v, j, r)) * std::pow(r, j);
  const double nm = std::sqrt(derivative_norm_sq(v, m, r)) * std::pow(r, m);
  double worst = 0.0;
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw Error(ErrorKind::InvalidParameter, "eps grid must be positive");
    worst = std::max(worst, nj / (e * nm + std::pow(e, -static_cast<double>(j) / (m - j)) * n0));
  }
  return worst;
}

nlohmann::json CaccioppoliResult::to_json() const { return {{"r", r}, {"C", C}}; }

CaccioppoliResult caccioppoli_check(const ScalarField& u, double r, int max_order) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  if (max_order < 1) throw Error(ErrorKind::InvalidParameter, "at least one derivative order is needed");
  const double n0 = std::sqrt(region_norm(u, r));
  if (n0 == 0.0) throw Error(ErrorKind::Degenerate, "zero norm on B_r+");
  CaccioppoliResult c;
  c.r = r;
  for (int h = 1; h <= max_order; ++h)
    c.C.push_back(std::pow(r, h) * std::sqrt(derivative_norm_sq(u, h, r / 2.0)) / n0);
  return c;
}

namespace {

HardyFunction hardy(std::function<double(double)> f, std::function<double(double)> df,
                    std::vector<double> breaks = {}) {
  return {std::move(f), std::move(df), std::move(breaks)};
}

}  // namespace

std::vector<HardyFunction> hardy_battery() {
  return {
      hardy([](double t) { return t * std::exp(-t); }, [](double t) { return (1 - t) * std::exp(-t); }),
      hardy([](double t) { return t / (1 + t); }, [](double t) { return 1 / ((1 + t) * (1 + t)); }),
      hardy([](double t) { return std::atan(t); }, [](double t) { return 1 / (1 + t * t); }),
      hardy([](double t) { return 1 - std::exp(-t); }, [](double t) { return std::exp(-t); }),
      hardy([](double t) { return std::sin(t) * std::exp(-t); },
            [](double t) { return (std::cos(t) - std::sin(t)) * std::exp(-t); }),
      hardy([](double t) { return t * t * std::exp(-t); }, [](double t) { return (2 * t - t * t) * std::exp(-t); }),
      hardy([](double t) { return std::log1p(t) / (1 + t); },
            [](double t) { return (1 - std::log1p(t)) / ((1 + t) * (1 + t)); }),
      hardy([](double t) { return std::pow(1 - std::exp(-t), 2); },
            [](double t) { return 2 * (1 - std::exp(-t)) * std::exp(-t); }),
      hardy([](double t) { return std::tanh(t); }, [](double t) { return 1 / std::pow(std::cosh(t), 2); }),
      hardy([](double t) { return std::sin(t) / (1 + t); },
            [](double t) { return std::cos(t) / (1 + t) - std::sin(t) / ((1 + t) * (1 + t)); }),
      hardy([](double t) { return t < 2 ? t * (2 - t) : 0.0; }, [](double t) { return t < 2 ? 2 - 2 * t : 0.0; },
            {2.0}),
      hardy([](double t) { return std::pow(t, 0.55) * std::exp(-t); },
            [](double t) { return (0.55 * std::pow(t, -0.45) - std::pow(t, 0.55)) * std::exp(-t); }),
      hardy([](double t) { return std::pow(t, 0.75) / (1 + t); },
            [](double t) { return 0.75 * std::pow(t, -0.25) / (1 + t) - std::pow(t, 0.75) / ((1 + t) * (1 + t)); }),
      hardy([](double t) { return t / (1 + t * t); }, [](double t) { return (1 - t * t) / std::pow(1 + t * t, 2); }),
      hardy([](double t) { return std::min(t, 1.0) * std::min(1.0, 3.0 / t); },
            [](double t) { return t < 1 ? 1.0 : (t < 3 ? 0.0 : -3.0 / (t * t)); }, {1.0, 3.0}),
      hardy([](double t) { return std::sin(t) * std::sin(t) / (1 + t); },
            [](double t) {
              return std::sin(2 * t) / (1 + t) - std::sin(t) * std::sin(t) / ((1 + t) * (1 + t));
            }),
      hardy([](double t) { return std::erf(t); },
            [](double t) { return 2 / std::sqrt(std::numbers::pi) * std::exp(-t * t); }),
      hardy([](double t) { return t * std::exp(-t * t); }, [](double t) { return (1 - 2 * t * t) * std::exp(-t * t); }),
      hardy([](double t) { return std::pow(t, 0.6) * std::exp(-0.1 * t); },
            [](double t) { return (0.6 * std::pow(t, -0.4) - 0.1 * std::pow(t, 0.6)) * std::exp(-0.1 * t); }),
      hardy([](double t) { return 1 - 1 / std::sqrt(1 + t); }, [](double t) { return 0.5 * std::pow(1 + t, -1.5); }),
  };
}

}  // namespace ucp
