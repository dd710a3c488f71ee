#include "sbm/analysis.hpp"

#include "sbm/errors.hpp"
#include "sbm/p1.hpp"
#include "sbm/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace sbm {

namespace {

constexpr double kSingularNudgeRadius = 1e-14;
constexpr double kSingularNudge = 1e-12;

P1Triangle<double> element(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
}

Eigen::Vector3d gather(const Eigen::VectorXd& v, const std::array<int, 3>& tri) {
  return {v(tri[0]), v(tri[1]), v(tri[2])};
}

// Exact gradient, nudged along the edge when the point sits on the singularity.
Point exact_gradient(const ExactSolution& sol, const Point& x, const Point& edge_dir) {
  if (sol.singular_point && (x - *sol.singular_point).norm() <= kSingularNudgeRadius) {
    return sol.grad(x + kSingularNudge * edge_dir.normalized());
  }
  return sol.grad(x);
}

void check_length(const TriMesh& mesh, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != mesh.num_vertices()) {
    throw AssemblyError("nodal vector length does not match the mesh");
  }
}

double pair_rate(double h0, double e0, double h1, double e1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Eigen::VectorXd interpolate(const TriMesh& mesh, const ExactSolution& sol) {
  Eigen::VectorXd out(mesh.num_vertices());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) out(i) = sol.eval(mesh.vertices[i]);
  return out;
}

ErrorNorms error_norms(const TriMesh& mesh, const Eigen::VectorXd& uh, const ExactSolution& sol) {
  check_length(mesh, uh);
  const auto rule = triangle_rule_degree4();
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto el = element(mesh, static_cast<int>(t));
    const Eigen::Vector3d local = gather(uh, mesh.triangles[t]);
    const Point grad_h = el.grads * local;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point x = el.point(rule.bary[q]);
      const double w = rule.weights[q] * el.area;
      const double e = sol.eval(x) - rule.bary[q].dot(local);
      l2 += w * e * e;
      h1 += w * (sol.grad(x) - grad_h).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

Eigen::SparseMatrix<double> energy_gram(const TriMesh& mesh, const BoundaryQuadrature& boundary) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * (mesh.num_triangles() + mesh.boundary_edges.size()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto el = element(mesh, static_cast<int>(t));
    const Eigen::Matrix3d k = el.stiffness();
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], k(i, j));
  }
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    const auto el = element(mesh, edge.triangle);
    const auto& tri = mesh.triangles[edge.triangle];
    for (const auto& qp : boundary.edges[e].points) {
      const Eigen::Vector3d s = el.barycentric(qp.x_tilde) + el.grads.transpose() * qp.sample.d;
      const Eigen::Matrix3d local = (qp.weight / edge.h) * s * s.transpose();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], local(i, j));
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

double energy_norm(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                   const Eigen::VectorXd& v) {
  check_length(mesh, v);
  double grad_part = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto el = element(mesh, static_cast<int>(t));
    grad_part += el.area * (el.grads * gather(v, mesh.triangles[t])).squaredNorm();
  }
  double bnd_part = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    const auto el = element(mesh, edge.triangle);
    const Eigen::Vector3d local = gather(v, mesh.triangles[edge.triangle]);
    for (const auto& qp : boundary.edges[e].points) {
      const double s = shift_eval(el, local, qp.x_tilde, qp.sample.d);
      bnd_part += qp.weight / edge.h * s * s;
    }
  }
  return std::sqrt(grad_part + bnd_part);
}

double energy_error(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                    const Eigen::VectorXd& uh, const ExactSolution& sol) {
  const double h1 = error_norms(mesh, uh, sol).h1;
  double bnd = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    const auto el = element(mesh, edge.triangle);
    const Eigen::Vector3d local = gather(uh, mesh.triangles[edge.triangle]);
    const Point edge_dir = mesh.vertices[edge.v[1]] - mesh.vertices[edge.v[0]];
    for (const auto& qp : boundary.edges[e].points) {
      const Point& d = qp.sample.d;
      const double shifted_u = sol.eval(qp.x_tilde) + exact_gradient(sol, qp.x_tilde, edge_dir).dot(d);
      const double s = shifted_u - shift_eval(el, local, qp.x_tilde, d);
      bnd += qp.weight / edge.h * s * s;
    }
  }
  return std::sqrt(h1 * h1 + bnd);
}

double remainder_norm(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                      const ExactSolution& sol) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    const Point edge_dir = mesh.vertices[edge.v[1]] - mesh.vertices[edge.v[0]];
    for (const auto& qp : boundary.edges[e].points) {
      const double r = qp.g_bar - sol.eval(qp.x_tilde) -
                       exact_gradient(sol, qp.x_tilde, edge_dir).dot(qp.sample.d);
      sum += qp.weight / edge.h * r * r;
    }
  }
  return std::sqrt(sum);
}

ErrorReport error_report(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                         const Eigen::VectorXd& uh, const ExactSolution& sol) {
  const MeshParams params = mesh_params(mesh);
  const ErrorNorms norms = error_norms(mesh, uh, sol);
  ErrorReport rep;
  rep.h_gamma = params.h_gamma;
  rep.h_omega = params.h_omega;
  rep.err_l2 = norms.l2;
  rep.err_h1 = norms.h1;
  rep.err_energy = energy_error(mesh, boundary, uh, sol);
  rep.remainder = remainder_norm(mesh, boundary, sol);
  rep.dofs = mesh.num_vertices();
  return rep;
}

CoercivityEstimate coercivity_estimate(const SparseSystem& sys, const TriMesh& mesh,
                                       int dense_threshold) {
  const Eigen::SparseMatrix<double> a = sys.matrix;
  const Eigen::SparseMatrix<double> sym = 0.5 * (a + Eigen::SparseMatrix<double>(a.transpose()));
  const Eigen::SparseMatrix<double> gram = energy_gram(mesh, sys.boundary);
  const Eigen::Index n = sym.rows();
  CoercivityEstimate out;

  if (n <= dense_threshold) {
    const Eigen::MatrixXd s_dense(sym);
    const Eigen::MatrixXd m_dense(gram);
    if (Eigen::LLT<Eigen::MatrixXd>(m_dense).info() != Eigen::Success) {
      throw AssemblyError("coercivity: energy Gram matrix is singular");
    }
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        s_dense, m_dense, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    out.alpha_min = ges.eigenvalues()(0);
    out.method = "dense-generalized-eig";
    out.certified_positive = Eigen::LLT<Eigen::MatrixXd>(s_dense).info() == Eigen::Success;
    return out;
  }

  if (Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>(gram).info() != Eigen::Success) {
    throw AssemblyError("coercivity: energy Gram matrix is singular");
  }
  // Block inverse iteration on (S - sigma M) with Rayleigh-Ritz against the
  // pencil (S, M). sigma = 0 whenever S itself is positive definite.
  double sigma = 0.0;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
  for (int attempt = 0; attempt < 80; ++attempt) {
    chol.compute(sym - sigma * gram);
    if (chol.info() == Eigen::Success) break;
    sigma = sigma == 0.0 ? -1e-2 : 2.0 * sigma;
  }
  if (chol.info() != Eigen::Success) throw AssemblyError("coercivity: no admissible shift found");
  out.certified_positive = sigma == 0.0;

  constexpr int kBlock = 8;
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd x(n, kBlock);
  for (Eigen::Index j = 0; j < kBlock; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = dist(rng);

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 1000; ++it) {
    const Eigen::MatrixXd y = chol.solve(gram * x);
    const Eigen::MatrixXd sy = y.transpose() * (sym * y);
    const Eigen::MatrixXd my = y.transpose() * (gram * y);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        0.5 * (sy + sy.transpose()), 0.5 * (my + my.transpose()));
    x = y * ges.eigenvectors();
    const double lambda = ges.eigenvalues()(0);
    out.iterations = it;
    out.alpha_min = lambda;
    if (std::abs(lambda - prev) <= 1e-10 * std::max(1.0, std::abs(lambda))) break;
    prev = lambda;
  }
  out.method = "subspace-inverse-iteration";
  return out;
}

double nonsymmetry_bracket(const TriMesh& mesh, const BoundaryQuadrature& boundary,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  check_length(mesh, w);
  check_length(mesh, v);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    const auto el = element(mesh, edge.triangle);
    const auto& tri = mesh.triangles[edge.triangle];
    const Point grad_w = el.grads * gather(w, tri);
    const Point grad_v = el.grads * gather(v, tri);
    const double dn_w = edge.normal.dot(grad_w);
    const double dn_v = edge.normal.dot(grad_v);
    for (const auto& qp : boundary.edges[e].points) {
      sum += qp.weight * (dn_w * grad_v.dot(qp.sample.d) - dn_v * grad_w.dot(qp.sample.d));
    }
  }
  return sum;
}

double nonsymmetry_residual(const SparseSystem& sys, const TriMesh& mesh, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& v) {
  const double awv = apply_form(sys, w, v);
  const double avw = apply_form(sys, v, w);
  const double bracket = nonsymmetry_bracket(mesh, sys.boundary, w, v);
  return std::abs((awv - avw) - bracket) / (1.0 + std::abs(awv));
}

RateTable fit_rates(const std::vector<std::pair<double, double>>& series, double exact_floor) {
  if (series.size() < 2) throw std::invalid_argument("fit_rates: need at least two entries");
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i].first < series[i - 1].first)) {
      throw std::invalid_argument("fit_rates: h must be strictly decreasing");
    }
  }
  RateTable table;
  for (std::size_t i = 0; i < series.size(); ++i) {
    RateRow row;
    row.h = series[i].first;
    row.error = series[i].second;
    if (i > 0) {
      const auto& [h0, e0] = series[i - 1];
      if (e0 <= exact_floor || row.error <= exact_floor) {
        row.exact = true;
      } else {
        row.rate = pair_rate(h0, e0, row.h, row.error);
      }
    }
    table.rows.push_back(row);
  }

  const std::size_t k = std::min<std::size_t>(4, series.size());
  const std::size_t first = series.size() - k;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < series.size(); ++i) {
    if (series[i].second <= exact_floor) table.fitted_exact = true;
    mx += std::log(series[i].first);
    my += std::log(series[i].second);
  }
  if (table.fitted_exact) return table;
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < series.size(); ++i) {
    const double dx = std::log(series[i].first) - mx;
    sxy += dx * (std::log(series[i].second) - my);
    sxx += dx * dx;
  }
  table.fitted_slope = sxy / sxx;
  return table;
}

void write_rate_csv_header(std::ostream& os) {
  os << "h,dofs,l2,l2_rate,h1,h1_rate,energy,energy_rate,remainder,remainder_rate\n";
}

void write_rate_csv_row(std::ostream& os, const ErrorReport* prev, const ErrorReport& cur,
                        double exact_floor) {
  auto rate_cell = [&](double ErrorReport::*field) -> std::string {
    if (prev == nullptr) return "";
    const double e0 = prev->*field;
    const double e1 = cur.*field;
    if (e0 <= exact_floor || e1 <= exact_floor) return "exact";
    return format_number(pair_rate(prev->h_omega, e0, cur.h_omega, e1));
  };
  os << format_number(cur.h_omega) << "," << cur.dofs << "," << format_number(cur.err_l2) << ","
     << rate_cell(&ErrorReport::err_l2) << "," << format_number(cur.err_h1) << ","
     << rate_cell(&ErrorReport::err_h1) << "," << format_number(cur.err_energy) << ","
     << rate_cell(&ErrorReport::err_energy) << "," << format_number(cur.remainder) << ","
     << rate_cell(&ErrorReport::remainder) << "\n";
}

void write_rate_csv(std::ostream& os, const std::vector<ErrorReport>& reports, double exact_floor) {
  write_rate_csv_header(os);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    write_rate_csv_row(os, i == 0 ? nullptr : &reports[i - 1], reports[i], exact_floor);
  }
}

}  // namespace sbm
