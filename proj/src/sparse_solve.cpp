#include "ucp/sparse_solve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <sstream>

#include "ucp/error.hpp"

namespace ucp {

namespace {

using Vec = Eigen::VectorXd;

double one_norm(const Eigen::SparseMatrix<double>& A) {
  double best = 0.0;
  for (int c = 0; c < A.outerSize(); ++c) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

// Hager's estimate of |A^{-1}|_1 from solves with A and A^T.
double inverse_one_norm(int n, const std::function<Vec(const Vec&)>& solve,
                        const std::function<Vec(const Vec&)>& solve_t) {
  Vec x = Vec::Constant(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vec y = solve(x);
    const double est_new = y.lpNorm<1>();
    Vec xi(n);
    for (int k = 0; k < n; ++k) xi[k] = y[k] >= 0.0 ? 1.0 : -1.0;
    const Vec z = solve_t(xi);
    Eigen::Index j = 0;
    z.cwiseAbs().maxCoeff(&j);
    if (iter > 0 && (std::abs(z[j]) <= z.dot(x) || est_new <= est)) {
      est = std::max(est, est_new);
      break;
    }
    est = est_new;
    x.setZero();
    x[j] = 1.0;
  }
  return est;
}

template <class Factor>
Vec refine_and_report(const Eigen::SparseMatrix<double>& A, const Vec& b, const Factor& solve,
                      const SolverOptions& options, LinearSolveReport& report) {
  Vec x = solve(b);
  for (int k = 0; k < options.refinement_steps; ++k) {
    const Vec r = b - A * x;
    x += solve(r);
  }
  const double bn = b.lpNorm<Eigen::Infinity>();
  report.relative_residual = (A * x - b).lpNorm<Eigen::Infinity>() / (bn > 0.0 ? bn : 1.0);
  if (!x.allFinite()) throw Error(ErrorKind::Solver, "non-finite solution");
  return x;
}

void check_condition(double cond, const SolverOptions& options) {
  if (cond > options.condition_threshold || !std::isfinite(cond)) {
    std::ostringstream os;
    os << "system ill-conditioned: 1-norm condition estimate " << cond << " exceeds " << options.condition_threshold;
    throw Error(ErrorKind::Solver, os.str());
  }
}

}  // namespace

Eigen::VectorXd solve_sparse(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, bool symmetric,
                             const SolverOptions& options, LinearSolveReport& report) {
  const int n = static_cast<int>(A.rows());
  report.unknowns = n;
  if (n == 0) return Vec();
  if (symmetric) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
      report.method = "sparse LDLT";
      auto solve = [&](const Vec& r) -> Vec { return ldlt.solve(r); };
      if (options.estimate_condition) {
        report.condition_estimate = one_norm(A) * inverse_one_norm(n, solve, solve);
        check_condition(report.condition_estimate, options);
      }
      return refine_and_report(A, b, solve, options, report);
    }
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::Solver, "sparse LU failed: " + lu.lastErrorMessage());
  report.method = "sparse LU";
  auto solve = [&](const Vec& r) -> Vec { return lu.solve(r); };
  auto solve_t = [&](const Vec& r) -> Vec { return lu.transpose().solve(r); };
  if (options.estimate_condition) {
    report.condition_estimate = one_norm(A) * inverse_one_norm(n, solve, solve_t);
    check_condition(report.condition_estimate, options);
  }
  return refine_and_report(A, b, solve, options, report);
}

}  // namespace ucp
