#pragma once

#include "sbm/assembly.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace sbm {

enum class SolveMethod { BiCGStab, DenseLU };

struct SolveReport {
  Eigen::VectorXd solution;
  int iterations = 0;
  double final_residual = 0.0;  // |b - A x| / |b|
  SolveMethod method = SolveMethod::BiCGStab;
  std::vector<double> residual_history;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = -1;  // -1: 10 * dimension
  int dense_threshold = 512;
};

/// Jacobi-preconditioned BiCGStab from x0 = 0; systems no larger than the
/// dense threshold are factorised with partially pivoted LU instead.
SolveReport solve(const CsrMatrix& matrix, const Eigen::VectorXd& rhs, const SolveOptions& opts = {});
SolveReport solve(const SparseSystem& sys, const SolveOptions& opts = {});

std::string to_string(SolveMethod m);

}  // namespace sbm
