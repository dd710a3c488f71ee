#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace sbm {

using Point = Eigen::Vector2d;

struct Box {
  Point lo;
  Point hi;

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  bool contains_strictly(const Point& p) const {
    return p.x() > lo.x() && p.x() < hi.x() && p.y() > lo.y() && p.y() < hi.y();
  }
};

/// A smooth piece of the true boundary, parametrized over t in [0,1].
///
/// Sidesets of a domain are listed counterclockwise, so the outward normal is
/// the tangent rotated clockwise. `dirichlet_g` is optional; when empty the
/// Dirichlet datum is taken as the trace of the exact solution.
struct Sideset {
  int id = 0;
  std::function<Point(double)> curve;
  std::function<Point(double)> tangent;    // c'(t)
  std::function<Point(double)> curvature;  // c''(t)
  std::function<double(double)> dirichlet_g;

  Point at(double t) const { return curve(t); }
  Point normal(double t) const;
};

struct DomainSpec {
  std::string name;
  std::vector<Sideset> sidesets;
  std::function<bool(const Point&)> inside;
  /// Strictly contains clos(Omega).
  Box bbox;
  /// Box covered by the background triangulation. May coincide with parts of
  /// Gamma (fitted sides).
  Box mesh_box;

  const Sideset& sideset(int id) const;
};

struct Projection {
  double t = 0.0;
  Point p = Point::Zero();
  double dist = 0.0;
};

struct DistanceSample {
  Point x_tilde = Point::Zero();
  Point x = Point::Zero();
  Point d = Point::Zero();
  int sideset_id = -1;
  double t = 0.0;
};

/// Closest point on a sideset: 64 uniform seed intervals, golden-section on the
/// brackets of sampled local minima, then Newton on the squared distance.
Projection closest_point(const Sideset& sideset, const Point& x);

/// Ids of the sidesets holding the closest point of `x` on the whole boundary.
/// Projections landing on a junction of two sidesets report both.
std::vector<int> nearest_sidesets(const DomainSpec& domain, const Point& x);

/// Distance from `x` to the whole boundary, with the closest point.
Projection closest_point_on_boundary(const DomainSpec& domain, const Point& x);

int assign_sideset(const Point& a, const Point& b, const Point& edge_normal,
                   const DomainSpec& domain);

DistanceSample distance_vector(const Point& x_tilde, const Sideset& sideset);

// Catalog.

/// Re-entrant corner domain: bottom y = -|atan x| on [-0.6, 0.6], top y = 0.55.
DomainSpec make_corner_domain();
/// Unit square, meshed exactly (fitted).
DomainSpec make_square_domain();
/// Disk of the given radius centred in the unit square.
DomainSpec make_disk_domain(double radius = 0.45, Point center = Point(0.5, 0.5));

/// "square", "disk", "disk:<radius>" or "corner".
DomainSpec make_domain(const std::string& name);
std::vector<std::string> domain_catalog();

/// Straight sideset from a to b.
Sideset make_segment(int id, const Point& a, const Point& b);

}  // namespace sbm
