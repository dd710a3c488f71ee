#pragma once

#include "sbm/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sbm {

enum class SolutionKind { Affine, SmoothProduct, CornerSingular };

struct ExactSolution {
  SolutionKind kind = SolutionKind::Affine;
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<double(const Point&)> source;  // f = -Laplace u

  // Corner-singular parameters: u = rho^lambda sin(lambda theta + phase).
  double lambda = 0.0;
  double phase = 0.0;
  std::optional<Point> singular_point;

  double eval(const Point& x) const { return value(x); }
  Point grad(const Point& x) const { return gradient(x); }
  double rhs_f(const Point& x) const { return source(x); }
};

/// u = a + b x + c y.
ExactSolution make_affine_solution(double a, double b, double c);
/// u = sin(pi x) sin(pi y).
ExactSolution make_sinsin_solution();
/// u = rho^(2/3) sin(2 theta / 3 + pi / 6) around C = (0,0), with theta = 0 on
/// the tangent of the bottom-right branch and increasing counterclockwise.
ExactSolution make_corner_solution();

/// "affine:a,b,c", "sinsin" or "corner23".
ExactSolution make_solution(const std::string& spec);
std::vector<std::string> solution_catalog();

/// Copy of `domain` whose sidesets carry g = u restricted to each curve.
DomainSpec with_dirichlet_trace(DomainSpec domain, const ExactSolution& sol);

}  // namespace sbm
