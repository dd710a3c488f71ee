#include "sbm/assembly.hpp"

#include "sbm/errors.hpp"
#include "sbm/p1.hpp"
#include "sbm/quadrature.hpp"

#include <ostream>

namespace sbm {

BoundaryQuadrature build_boundary_quadrature(const TriMesh& mesh, const DomainSpec& domain,
                                             const ExactSolution* sol, int nq_edge) {
  if (nq_edge < 1) throw AssemblyError("edge quadrature needs at least one point");
  const auto rule = gauss_legendre(nq_edge);
  BoundaryQuadrature out;
  out.edges.reserve(mesh.boundary_edges.size());
  for (const auto& e : mesh.boundary_edges) {
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    EdgeQuadrature eq;
    eq.sideset_id = assign_sideset(a, b, e.normal, domain);
    const Sideset& s = domain.sideset(eq.sideset_id);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      QuadPoint qp;
      qp.x_tilde = a + rule.nodes[q] * (b - a);
      qp.weight = rule.weights[q] * e.length;
      qp.sample = distance_vector(qp.x_tilde, s);
      if (s.dirichlet_g) {
        qp.g_bar = s.dirichlet_g(qp.sample.t);
      } else if (sol != nullptr) {
        qp.g_bar = sol->eval(qp.sample.x);
      }
      eq.points.push_back(qp);
    }
    out.edges.push_back(std::move(eq));
  }
  return out;
}

SparseSystem assemble(const TriMesh& mesh, const DomainSpec& domain, const ExactSolution& sol,
                      double gamma, int nq_edge) {
  if (!(gamma > 0.0)) throw AssemblyError("gamma must be positive");
  return assemble(mesh, build_boundary_quadrature(mesh, domain, &sol, nq_edge), sol, gamma);
}

SparseSystem assemble(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                      const ExactSolution& sol, double gamma) {
  if (!(gamma > 0.0)) throw AssemblyError("gamma must be positive");
  if (boundary.edges.size() != mesh.boundary_edges.size()) {
    throw AssemblyError("boundary quadrature does not match the mesh boundary");
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * (mesh.num_triangles() + mesh.boundary_edges.size()));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const auto volume_rule = triangle_rule_degree2();

  // Interior: (grad w, grad v) and (f, v).
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const P1Triangle<double> el(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    const Eigen::Matrix3d k = el.stiffness();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], k(i, j));
    }
    for (std::size_t q = 0; q < volume_rule.weights.size(); ++q) {
      const Eigen::Vector3d& bary = volume_rule.bary[q];
      const double fw = sol.rhs_f(el.point(bary)) * volume_rule.weights[q] * el.area;
      for (int i = 0; i < 3; ++i) rhs(tri[i]) += fw * bary(i);
    }
  }

  // Boundary: -(dn w, v) - (S w, dn v) + gamma (h^-1 S w, S v), and
  // -(g_bar, dn v) + gamma (h^-1 g_bar, S v).
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const BoundaryEdge& edge = mesh.boundary_edges[e];
    const EdgeQuadrature& eq = boundary.edges[e];
    if (eq.sideset_id < 0) {
      throw AssemblyError("boundary edge " + std::to_string(e) + " has no sideset assignment");
    }
    const auto& tri = mesh.triangles[edge.triangle];
    const P1Triangle<double> el(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    const Eigen::Vector3d dn = el.grads.transpose() * edge.normal;
    const double penalty = gamma / edge.h;
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    Eigen::Vector3d local_rhs = Eigen::Vector3d::Zero();
    for (const QuadPoint& qp : eq.points) {
      const Eigen::Vector3d phi = el.barycentric(qp.x_tilde);
      const Eigen::Vector3d shifted = phi + el.grads.transpose() * qp.sample.d;
      // local(i, j) = a_h(phi_j, phi_i)
      local.noalias() += qp.weight * (-phi * dn.transpose() - dn * shifted.transpose() +
                                      penalty * shifted * shifted.transpose());
      local_rhs.noalias() += qp.weight * qp.g_bar * (-dn + penalty * shifted);
    }
    for (int i = 0; i < 3; ++i) {
      rhs(tri[i]) += local_rhs(i);
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], local(i, j));
    }
  }

  SparseSystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  sys.gamma = gamma;
  sys.boundary = boundary;
  return sys;
}

double apply_form(const SparseSystem& sys, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  const auto n = sys.matrix.rows();
  if (w.size() != n || v.size() != n) {
    throw AssemblyError("apply_form: vector length " + std::to_string(w.size()) + "/" +
                        std::to_string(v.size()) + " does not match dimension " + std::to_string(n));
  }
  return v.dot(sys.matrix * w);
}

void write_matrix_market(std::ostream& os, const CsrMatrix& matrix) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << matrix.rows() << " " << matrix.cols() << " " << matrix.nonZeros() << "\n";
  os.precision(17);
  for (Eigen::Index r = 0; r < matrix.outerSize(); ++r) {
    for (CsrMatrix::InnerIterator it(matrix, r); it; ++it) {
      os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
    }
  }
}

}  // namespace sbm
