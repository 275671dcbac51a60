#pragma once

#include <Eigen/Sparse>
#include <string>

namespace ucp {

struct SolverOptions {
  double condition_threshold = 1e15;
  bool estimate_condition = true;
  int refinement_steps = 1;
};

struct LinearSolveReport {
  int unknowns = 0;
  std::string method;
  double condition_estimate = 0.0;  // 1-norm estimate; 0 when not computed
  double relative_residual = 0.0;   // |A x - b|_inf / |b|_inf after refinement
};

// Sparse direct solve (LDLT when symmetric succeeds, LU otherwise) with
// iterative refinement. Throws Solver errors for singular or
// ill-conditioned systems.
Eigen::VectorXd solve_sparse(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, bool symmetric,
                             const SolverOptions& options, LinearSolveReport& report);

}  // namespace ucp
