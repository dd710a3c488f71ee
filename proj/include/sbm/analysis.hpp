#pragma once

#include "sbm/assembly.hpp"
#include "sbm/exact_solution.hpp"
#include "sbm/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sbm {

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;  // gradient seminorm
};

struct ErrorReport {
  double h_gamma = 0.0;
  double h_omega = 0.0;
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  double err_energy = 0.0;
  double remainder = 0.0;
  std::size_t dofs = 0;
};

/// Nodal interpolant of the exact solution.
Eigen::VectorXd interpolate(const TriMesh& mesh, const ExactSolution& sol);

/// L2 and H1-seminorm errors on the surrogate domain, degree-4 triangle rule.
ErrorNorms error_norms(const TriMesh& mesh, const Eigen::VectorXd& uh, const ExactSolution& sol);

/// Gram matrix of the energy inner product
/// (grad w, grad v) + (h^-1 S_h w, S_h v) on the surrogate boundary.
Eigen::SparseMatrix<double> energy_gram(const TriMesh& mesh, const BoundaryQuadrature& boundary);

/// ||v||_a for a discrete function.
double energy_norm(const TriMesh& mesh, const BoundaryQuadrature& boundary, const Eigen::VectorXd& v);

/// ||u - u_h||_a with u the exact solution.
double energy_error(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                    const Eigen::VectorXd& uh, const ExactSolution& sol);

/// ||h^-1/2 (g_bar - u - grad u . d)|| over the surrogate boundary.
double remainder_norm(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                      const ExactSolution& sol);

ErrorReport error_report(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                         const Eigen::VectorXd& uh, const ExactSolution& sol);

struct CoercivityEstimate {
  double alpha_min = 0.0;
  std::string method;        // "dense-generalized-eig" or "subspace-inverse-iteration"
  bool certified_positive = false;  // symmetric part of A admitted a Cholesky factor
  int iterations = 0;
};

/// min over v of a_h(v,v) / ||v||_a^2.
CoercivityEstimate coercivity_estimate(const SparseSystem& sys, const TriMesh& mesh,
                                       int dense_threshold = 2000);

/// (dn w, grad v . d) - (dn v, grad w . d) on the surrogate boundary.
double nonsymmetry_bracket(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& v);

/// |[a(w,v) - a(v,w)] - bracket| / (1 + |a(w,v)|).
double nonsymmetry_residual(const SparseSystem& sys, const TriMesh& mesh, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& v);

struct RateRow {
  double h = 0.0;
  double error = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();  // NaN on the first row
  bool exact = false;  // rate undefined because an error vanished
};

struct RateTable {
  std::vector<RateRow> rows;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  bool fitted_exact = false;
};

/// Pairwise rates log(e0/e1)/log(h0/h1) and the least-squares slope of
/// log e against log h over the last min(4, n) rows. Errors at or below
/// `exact_floor` count as exactly zero.
RateTable fit_rates(const std::vector<std::pair<double, double>>& series, double exact_floor = 0.0);

/// h,dofs,l2,l2_rate,h1,h1_rate,energy,energy_rate,remainder,remainder_rate
/// Rates use h_omega as the mesh size; "exact" marks a vanished error.
void write_rate_csv(std::ostream& os, const std::vector<ErrorReport>& reports,
                    double exact_floor = 0.0);
void write_rate_csv_header(std::ostream& os);
void write_rate_csv_row(std::ostream& os, const ErrorReport* prev, const ErrorReport& cur,
                        double exact_floor = 0.0);

}  // namespace sbm
