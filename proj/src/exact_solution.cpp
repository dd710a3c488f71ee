#include "sbm/exact_solution.hpp"

#include "sbm/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sbm {

ExactSolution make_affine_solution(double a, double b, double c) {
  ExactSolution sol;
  sol.kind = SolutionKind::Affine;
  std::ostringstream os;
  os.precision(17);
  os << "affine:" << a << "," << b << "," << c;
  sol.name = os.str();
  sol.value = [=](const Point& x) { return a + b * x.x() + c * x.y(); };
  sol.gradient = [=](const Point&) { return Point(b, c); };
  sol.source = [](const Point&) { return 0.0; };
  return sol;
}

ExactSolution make_sinsin_solution() {
  using std::numbers::pi;
  ExactSolution sol;
  sol.kind = SolutionKind::SmoothProduct;
  sol.name = "sinsin";
  sol.value = [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
  sol.gradient = [](const Point& x) {
    return Point(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                 pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
  };
  sol.source = [](const Point& x) {
    return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
  };
  return sol;
}

ExactSolution make_corner_solution() {
  using std::numbers::pi;
  ExactSolution sol;
  sol.kind = SolutionKind::CornerSingular;
  sol.name = "corner23";
  sol.lambda = 2.0 / 3.0;
  sol.phase = pi / 6.0;
  sol.singular_point = Point(0.0, 0.0);

  const double lambda = sol.lambda;
  const double phase = sol.phase;
  // Angle measured from the direction (1,-1), counterclockwise; the branch cut
  // points straight down from C, which lies outside the domain.
  auto theta_of = [](const Point& x) {
    double th = std::atan2(x.y(), x.x()) + 0.25 * pi;
    if (th < 0.0) th += 2.0 * pi;
    return th;
  };
  sol.value = [=](const Point& x) {
    const double rho = x.norm();
    if (rho == 0.0) return 0.0;
    return std::pow(rho, lambda) * std::sin(lambda * theta_of(x) + phase);
  };
  sol.gradient = [=](const Point& x) {
    const double rho = x.norm();
    const double inf = std::numeric_limits<double>::infinity();
    if (rho == 0.0) return Point(inf, inf);
    const double th = theta_of(x);
    const double scale = lambda * std::pow(rho, lambda - 1.0);
    const double u_rho = scale * std::sin(lambda * th + phase);
    const double u_theta = scale * std::cos(lambda * th + phase);  // (1/rho) du/dtheta
    const Point e_rho = x / rho;
    const Point e_theta(-e_rho.y(), e_rho.x());
    return Point(u_rho * e_rho + u_theta * e_theta);
  };
  sol.source = [](const Point&) { return 0.0; };
  return sol;
}

std::vector<std::string> solution_catalog() { return {"affine:a,b,c", "sinsin", "corner23"}; }

ExactSolution make_solution(const std::string& spec) {
  if (spec == "sinsin") return make_sinsin_solution();
  if (spec == "corner23") return make_corner_solution();
  if (spec.rfind("affine:", 0) == 0) {
    std::istringstream is(spec.substr(7));
    double a = 0.0, b = 0.0, c = 0.0;
    char s1 = 0, s2 = 0;
    if (is >> a >> s1 >> b >> s2 >> c && s1 == ',' && s2 == ',' && (is >> std::ws).eof()) {
      return make_affine_solution(a, b, c);
    }
  }
  std::string msg = "unknown solution '" + spec + "'; available:";
  for (const auto& s : solution_catalog()) msg += " " + s;
  throw ConfigError(msg);
}

DomainSpec with_dirichlet_trace(DomainSpec domain, const ExactSolution& sol) {
  for (auto& s : domain.sidesets) {
    s.dirichlet_g = [curve = s.curve, u = sol.value](double t) { return u(curve(t)); };
  }
  return domain;
}

}  // namespace sbm
