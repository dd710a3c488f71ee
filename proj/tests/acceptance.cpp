// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include "sbm/driver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sbm;

struct Criterion {
  std::string name;
  bool pass = true;
  std::vector<std::string> details;

  explicit Criterion(std::string n) : name(std::move(n)) {}

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.push_back(std::string(ok ? "ok   " : "MISS ") + buf);
    pass = pass && ok;
  }
};

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

RunConfig study_config(const std::string& domain, const std::string& solution, int n0, int levels) {
  RunConfig cfg;
  cfg.domain = domain;
  cfg.solution = solution;
  cfg.n0 = n0;
  cfg.levels = levels;
  cfg.gamma = 10.0;
  return cfg;
}

// Reference magnitudes at h = 1.01e-2.
constexpr double kRefH = 1.01e-2;
constexpr double kRefL2 = 6.69e-4;
constexpr double kRefH1 = 2.37e-2;

struct CornerRun {
  StudyResult result;
  std::string csv;
  double seconds = 0.0;
};

CornerRun corner_study() {
  CornerRun run;
  std::ostringstream csv, log;
  const auto t0 = std::chrono::steady_clock::now();
  run.result = run_study(study_config("corner", "corner23", 20, 5), csv, log);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.csv = csv.str();
  return run;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;
  const RunConfig raw;  // unshifted meshes

  // 1. Corner-domain convergence.
  const CornerRun corner = corner_study();
  {
    Criterion c{"1 corner convergence (corner23, gamma=10, n0=20, 5 levels)"};
    const auto& reps = corner.result.reports;
    c.check(in_range(reps.front().h_omega, 0.07, 0.09), "coarsest h_omega = %.4e (target ~8e-2)",
            reps.front().h_omega);
    c.check(in_range(corner.result.h1.fitted_slope, 0.56, 0.76), "H1 fitted slope %.4f in [0.56, 0.76]",
            corner.result.h1.fitted_slope);
    c.check(in_range(corner.result.l2.fitted_slope, 1.1, 1.55), "L2 fitted slope %.4f in [1.1, 1.55]",
            corner.result.l2.fitted_slope);
    const ErrorReport* near = &reps.front();
    for (const auto& r : reps) {
      if (std::abs(std::log(r.h_omega / kRefH)) < std::abs(std::log(near->h_omega / kRefH))) near = &r;
    }
    const double l2_ratio = near->err_l2 / kRefL2;
    const double h1_ratio = near->err_h1 / kRefH1;
    c.check(in_range(l2_ratio, 1.0 / 3.0, 3.0),
            "L2 at h=%.3e is %.3e, reference %.2e at h=%.2e: ratio %.3f in [1/3, 3]", near->h_omega,
            near->err_l2, kRefL2, kRefH, l2_ratio);
    c.check(in_range(h1_ratio, 1.0 / 3.0, 3.0),
            "H1 at h=%.3e is %.3e, reference %.2e at h=%.2e: ratio %.3f in [1/3, 3]", near->h_omega,
            near->err_h1, kRefH1, kRefH, h1_ratio);
    c.check(corner.seconds < 120.0, "runtime %.1f s < 120 s", corner.seconds);
    criteria.push_back(c);
  }

  // 2. Smooth optimal rates.
  std::ostringstream sink;
  const StudyResult square = run_study(study_config("square", "sinsin", 8, 4), sink, sink);
  const StudyResult disk = run_study(study_config("disk", "sinsin", 16, 4), sink, sink);
  {
    Criterion c{"2 smooth rates (sinsin on fitted square and disk r=0.45)"};
    c.check(in_range(square.l2.fitted_slope, 1.9, 2.1), "square L2 slope %.4f in [1.9, 2.1]",
            square.l2.fitted_slope);
    c.check(in_range(square.h1.fitted_slope, 0.9, 1.1), "square H1 slope %.4f in [0.9, 1.1]",
            square.h1.fitted_slope);
    c.check(disk.h1.fitted_slope >= 0.9, "disk H1 slope %.4f >= 0.9", disk.h1.fitted_slope);
    c.check(disk.l2.fitted_slope >= 1.4, "disk L2 slope %.4f >= 1.4", disk.l2.fitted_slope);
    criteria.push_back(c);
  }

  // 3. Remainder decay.
  {
    Criterion c{"3 remainder decay"};
    c.check(disk.remainder.fitted_slope >= 0.9, "disk/sinsin remainder slope %.4f >= 0.9",
            disk.remainder.fitted_slope);
    c.check(in_range(corner.result.remainder.fitted_slope, 0.56, 0.8),
            "corner/corner23 remainder slope %.4f in [0.56, 0.8]", corner.result.remainder.fitted_slope);
    criteria.push_back(c);
  }

  // 4. Identity suite over the acceptance meshes.
  {
    Criterion c{"4 identity suite"};
    const ExactSolution corner_sol = make_corner_solution();
    const ExactSolution sinsin = make_sinsin_solution();
    const ExactSolution affine = make_affine_solution(0.3, 1.7, -0.9);
    const DomainSpec corner_dom = with_dirichlet_trace(make_corner_domain(), corner_sol);
    const DomainSpec disk_dom = make_disk_domain();
    const DomainSpec square_dom = make_square_domain();

    // Fitted square reduces to symmetric Nitsche.
    double asym = 0.0;
    for (int n : {8, 16, 32, 64}) {
      const TriMesh mesh = surrogate_mesh(square_dom, n, raw);
      const CsrMatrix a = assemble(mesh, square_dom, sinsin, 10.0).matrix;
      const CsrMatrix at = CsrMatrix(a.transpose());
      asym = std::max(asym, CsrMatrix(a - at).coeffs().cwiseAbs().maxCoeff());
    }
    c.check(asym <= 1e-12, "fitted max|A - A^T| %.3e <= 1e-12", asym);

    struct MeshCase {
      const DomainSpec* dom;
      const ExactSolution* sol;
      std::vector<int> ns;
    };
    const std::vector<MeshCase> cases{{&corner_dom, &corner_sol, {20, 40, 80, 160, 320}},
                                      {&disk_dom, &sinsin, {16, 32, 64, 128}},
                                      {&square_dom, &sinsin, {8, 16, 32, 64}}};
    double nonsym = 0.0, patch_l2 = 0.0, patch_h1 = 0.0, remainder = 0.0;
    double alpha = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(2024);
    for (const auto& mc : cases) {
      for (int n : mc.ns) {
        const TriMesh mesh = surrogate_mesh(*mc.dom, n, raw);
        // Affine patch test and remainder on the same mesh.
        const SparseSystem aff = assemble(mesh, with_dirichlet_trace(*mc.dom, affine), affine, 10.0);
        // Direct factorization: the patch test checks the discretization, and
        // Krylov round-off on the finest meshes is of the order of the bound.
        const Eigen::SparseMatrix<double> acol(aff.matrix);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(acol);
        const Eigen::VectorXd uh = lu.solve(aff.rhs);
        const ErrorNorms err = error_norms(mesh, uh, affine);
        patch_l2 = std::max(patch_l2, err.l2);
        patch_h1 = std::max(patch_h1, err.h1);
        remainder = std::max(remainder, remainder_norm(mesh, aff.boundary, affine));
        // Coercivity of the operator actually used for the acceptance solves.
        const SparseSystem sys = assemble(mesh, *mc.dom, *mc.sol, 10.0);
        // Non-symmetry identity on 50 random pairs.
        for (int k = 0; k < 50; ++k) {
          const Eigen::VectorXd w = random_vector(rng, sys.matrix.rows());
          const Eigen::VectorXd v = random_vector(rng, sys.matrix.rows());
          nonsym = std::max(nonsym, nonsymmetry_residual(sys, mesh, w, v));
        }
        const CoercivityEstimate est = coercivity_estimate(sys, mesh);
        alpha = std::min(alpha, est.alpha_min);
        c.details.push_back("     " + mc.dom->name + " n=" + std::to_string(n) +
                            " alpha_min=" + std::to_string(est.alpha_min) + " (" + est.method + ")");
      }
    }
    c.check(nonsym <= 1e-10, "non-symmetry identity residual %.3e <= 1e-10 (50 pairs per mesh)", nonsym);
    c.check(patch_l2 <= 1e-10, "affine patch test err_l2 %.3e <= 1e-10", patch_l2);
    c.check(patch_h1 <= 1e-10, "affine patch test err_h1 %.3e <= 1e-10", patch_h1);
    c.check(remainder <= 1e-12, "affine remainder %.3e <= 1e-12", remainder);
    c.check(alpha > 0.0, "coercivity min alpha %.4e > 0 at gamma=10", alpha);
    criteria.push_back(c);
  }

  // 5. Node shifting on three disk refinements.
  {
    Criterion c{"5 node shifting (zeta=0.5, c_d=1, disk)"};
    const DomainSpec dom = make_disk_domain();
    for (int n : {16, 32, 64}) {
      const TriMesh mesh = surrogate_mesh(dom, n, raw);
      const TriMesh moved = shift_boundary_nodes(mesh, dom, {0.5, 1.0, true});
      const double ratio = max_shift_ratio(moved, dom, 0.5);
      double area = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        area = std::min(area, moved.signed_area(t) / mesh.signed_area(t));
      }
      c.check(ratio <= 1.0 + 1e-9, "n=%d max |d|/h^1.5 = %.6f <= 1 + 1e-9", n, ratio);
      c.check(area >= 0.2, "n=%d min area fraction %.4f >= 0.2", n, area);
    }
    criteria.push_back(c);
  }

  // 6. Determinism.
  {
    Criterion c{"6 byte-identical study CSV across runs"};
    const CornerRun again = corner_study();
    c.check(again.csv == corner.csv, "corner study CSV identical (%zu bytes)", corner.csv.size());
    criteria.push_back(c);
  }

  bool all = true;
  for (const auto& c : criteria) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
    for (const auto& d : c.details) std::cout << "    " << d << "\n";
    all = all && c.pass;
  }
  std::cout << "csv of the corner study:\n" << corner.csv;
  return all ? 0 : 1;
}
