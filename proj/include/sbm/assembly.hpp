#pragma once

#include "sbm/exact_solution.hpp"
#include "sbm/geometry.hpp"
#include "sbm/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct QuadPoint {
  Point x_tilde = Point::Zero();
  double weight = 0.0;  // includes the edge length
  DistanceSample sample;
  double g_bar = 0.0;  // g(M_h(x_tilde))
};

/// Gauss points of one surrogate edge with their distance samples.
struct EdgeQuadrature {
  int sideset_id = -1;
  std::vector<QuadPoint> points;
};

/// One EdgeQuadrature per entry of mesh.boundary_edges, in the same order.
struct BoundaryQuadrature {
  std::vector<EdgeQuadrature> edges;
};

/// Assigns a sideset to every boundary edge and samples d and g_bar at
/// nq_edge Gauss-Legendre points. With no solution and no sideset datum,
/// g_bar is zero.
BoundaryQuadrature build_boundary_quadrature(const TriMesh& mesh, const DomainSpec& domain,
                                             const ExactSolution* sol, int nq_edge = 3);

/// A u = b for the shifted Nitsche forms: A(i,j) = a_h(phi_j, phi_i), b(i) = l_h(phi_i).
struct SparseSystem {
  CsrMatrix matrix;
  Eigen::VectorXd rhs;
  double gamma = 0.0;
  BoundaryQuadrature boundary;
};

SparseSystem assemble(const TriMesh& mesh, const DomainSpec& domain, const ExactSolution& sol,
                      double gamma, int nq_edge = 3);

/// Same forms with precomputed boundary samples.
SparseSystem assemble(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                      const ExactSolution& sol, double gamma);

/// a_h(w, v) = v^T A w.
double apply_form(const SparseSystem& sys, const Eigen::VectorXd& w, const Eigen::VectorXd& v);

void write_matrix_market(std::ostream& os, const CsrMatrix& matrix);

}  // namespace sbm
