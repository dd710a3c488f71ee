#include "sbm/linsolve.hpp"

#include "sbm/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace sbm {

namespace {

double relative_residual(const CsrMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                         double b_norm) {
  return (b - a * x).norm() / b_norm;
}

SolveReport dense_lu(const CsrMatrix& a, const Eigen::VectorXd& b, double b_norm, double tol) {
  const Eigen::MatrixXd dense(a);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
  SolveReport rep;
  rep.method = SolveMethod::DenseLU;
  rep.solution = lu.solve(b);
  rep.final_residual = relative_residual(a, rep.solution, b, b_norm);
  if (rep.final_residual > tol) {
    // One step of iterative refinement.
    rep.solution += lu.solve(b - a * rep.solution);
    rep.final_residual = relative_residual(a, rep.solution, b, b_norm);
  }
  rep.residual_history.push_back(rep.final_residual);
  if (!std::isfinite(rep.final_residual) || rep.final_residual > tol) {
    std::ostringstream os;
    os << "solver failed: dense LU residual " << rep.final_residual << " above tolerance " << tol;
    throw SolverError(os.str());
  }
  return rep;
}

[[noreturn]] void fail(const std::string& why, const std::vector<double>& history) {
  std::ostringstream os;
  os << "solver failed: " << why << "; residual history (" << history.size() << " entries):";
  const std::size_t shown = std::min<std::size_t>(history.size(), 8);
  for (std::size_t i = history.size() - shown; i < history.size(); ++i) os << " " << history[i];
  throw SolverError(os.str());
}

}  // namespace

std::string to_string(SolveMethod m) { return m == SolveMethod::DenseLU ? "dense-lu" : "bicgstab"; }

SolveReport solve(const SparseSystem& sys, const SolveOptions& opts) {
  return solve(sys.matrix, sys.rhs, opts);
}

SolveReport solve(const CsrMatrix& a, const Eigen::VectorXd& b, const SolveOptions& opts) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw SolverError("solve: matrix must be square and match rhs");
  if (!b.allFinite()) throw SolverError("solve: right-hand side is not finite");

  const Eigen::VectorXd diag = a.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (diag(i) == 0.0) {
      throw SolverError("solve: zero diagonal entry at row " + std::to_string(i) +
                        " (isolated vertex?)");
    }
  }

  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    SolveReport rep;
    rep.solution = Eigen::VectorXd::Zero(n);
    rep.method = n <= opts.dense_threshold ? SolveMethod::DenseLU : SolveMethod::BiCGStab;
    return rep;
  }
  if (n <= opts.dense_threshold) return dense_lu(a, b, b_norm, opts.tol);

  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);
  const Eigen::VectorXd inv_diag = diag.cwiseInverse();
  const double threshold = opts.tol * b_norm;

  SolveReport rep;
  rep.method = SolveMethod::BiCGStab;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd r_hat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y(n), z(n), s(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int restarts = 0;
  constexpr int kMaxRestarts = 8;
  constexpr double kBreakdown = 1e-300;

  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = r_hat.dot(r);
    if (std::abs(rho_new) < 1e-30 * r_hat.norm() * r.norm() || std::abs(rho_new) < kBreakdown) {
      // Lost bi-orthogonality: restart the shadow residual.
      if (++restarts > kMaxRestarts) fail("BiCGStab breakdown (rho)", rep.residual_history);
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    y = inv_diag.cwiseProduct(p);
    v.noalias() = a * y;
    const double rv = r_hat.dot(v);
    if (std::abs(rv) < kBreakdown) fail("BiCGStab breakdown (alpha)", rep.residual_history);
    alpha = rho / rv;
    s = r - alpha * v;
    rep.iterations = it;
    if (s.norm() <= threshold) {
      x += alpha * y;
      r = b - a * x;
      rep.residual_history.push_back(r.norm() / b_norm);
      if (r.norm() <= threshold) break;
      continue;
    }
    z = inv_diag.cwiseProduct(s);
    t.noalias() = a * z;
    const double tt = t.squaredNorm();
    if (tt < kBreakdown) fail("BiCGStab breakdown (omega)", rep.residual_history);
    omega = t.dot(s) / tt;
    x += alpha * y + omega * z;
    r = s - omega * t;
    rep.residual_history.push_back(r.norm() / b_norm);
    if (!std::isfinite(rep.residual_history.back())) fail("non-finite residual", rep.residual_history);
    if (r.norm() <= threshold) {
      // Guard against drift between recursive and true residual.
      r = b - a * x;
      if (r.norm() <= threshold) break;
    }
    if (omega == 0.0) fail("BiCGStab breakdown (omega = 0)", rep.residual_history);
  }

  rep.solution = std::move(x);
  rep.final_residual = relative_residual(a, rep.solution, b, b_norm);
  if (!(rep.final_residual <= opts.tol)) {
    fail("no convergence within " + std::to_string(max_iter) + " iterations",
         rep.residual_history);
  }
  return rep;
}

}  // namespace sbm
