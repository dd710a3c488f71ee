#include "sbm/geometry.hpp"

#include "sbm/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sbm {

namespace {

constexpr int kSeedIntervals = 64;
constexpr double kParamTol = 1e-12;
constexpr double kJunctionParamTol = 1e-9;
constexpr double kTieDistTol = 1e-12;
constexpr double kTieScoreTol = 1e-12;
constexpr double kInsideSlack = 1e-14;
constexpr double kNewtonLocalStep = 1e-6;

double squared_distance(const Sideset& s, double t, const Point& x) {
  return (s.curve(t) - x).squaredNorm();
}

double golden_section(const Sideset& s, const Point& x, double a, double b) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = squared_distance(s, c, x);
  double fd = squared_distance(s, d, x);
  while (b - a > kParamTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = squared_distance(s, c, x);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = squared_distance(s, d, x);
    }
  }
  return 0.5 * (a + b);
}

// Newton on phi(t) = |c(t) - x|^2 / 2. A step is accepted when it lowers the
// distance, or when it is tiny and lowers |phi'|: near the minimum the
// distance stagnates at round-off level while the derivative still resolves.
double newton_refine(const Sideset& s, const Point& x, double t) {
  if (!s.tangent || !s.curvature) return t;
  auto slope = [&](double p) { return (s.curve(p) - x).dot(s.tangent(p)); };
  double best = squared_distance(s, t, x);
  double g = slope(t);
  for (int it = 0; it < 30; ++it) {
    const Point r = s.curve(t) - x;
    const Point c1 = s.tangent(t);
    const double hess = c1.squaredNorm() + r.dot(s.curvature(t));
    if (!(hess > 0.0)) break;
    const double t_new = std::clamp(t - g / hess, 0.0, 1.0);
    const double f_new = squared_distance(s, t_new, x);
    const double g_new = slope(t_new);
    const double step = std::abs(t_new - t);
    const bool lower = f_new < best;
    const bool flatter = step <= kNewtonLocalStep && std::abs(g_new) < std::abs(g) && f_new <= best * (1.0 + 1e-12);
    if (!(lower || flatter)) break;
    t = t_new;
    best = std::min(best, f_new);
    g = g_new;
    if (step < 1e-15) break;
  }
  return t;
}

std::string describe(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x.x() << ", " << x.y() << ")";
  return os.str();
}

// Sideset whose start coincides with the end of `s` (forward = true) or whose
// end coincides with the start of `s`.
int junction_neighbor(const DomainSpec& domain, const Sideset& s, bool forward) {
  const Point joint = forward ? s.at(1.0) : s.at(0.0);
  for (const auto& other : domain.sidesets) {
    if (other.id == s.id) continue;
    const Point q = forward ? other.at(0.0) : other.at(1.0);
    if ((q - joint).norm() <= 1e-10) return other.id;
  }
  return -1;
}

}  // namespace

Point Sideset::normal(double t) const {
  const Point tau = tangent(t);
  return Point(tau.y(), -tau.x()).normalized();
}

const Sideset& DomainSpec::sideset(int id) const {
  for (const auto& s : sidesets) {
    if (s.id == id) return s;
  }
  throw GeometryError("unknown sideset id " + std::to_string(id) + " in domain '" + name + "'");
}

Projection closest_point(const Sideset& sideset, const Point& x) {
  std::array<double, kSeedIntervals + 1> f{};
  for (int k = 0; k <= kSeedIntervals; ++k) {
    f[k] = squared_distance(sideset, static_cast<double>(k) / kSeedIntervals, x);
  }

  double best_t = 0.0;
  double best_f = f[0];
  if (f[kSeedIntervals] < best_f) {
    best_t = 1.0;
    best_f = f[kSeedIntervals];
  }
  for (int k = 0; k <= kSeedIntervals; ++k) {
    const bool left_ok = k == 0 || f[k] <= f[k - 1];
    const bool right_ok = k == kSeedIntervals || f[k] <= f[k + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = static_cast<double>(std::max(k - 1, 0)) / kSeedIntervals;
    const double b = static_cast<double>(std::min(k + 1, kSeedIntervals)) / kSeedIntervals;
    const double t = golden_section(sideset, x, a, b);
    const double ft = squared_distance(sideset, t, x);
    if (ft < best_f) {
      best_f = ft;
      best_t = t;
    }
  }

  best_t = newton_refine(sideset, x, best_t);
  // Snap to an endpoint when it is at least as close.
  for (double end : {0.0, 1.0}) {
    if (std::abs(best_t - end) < kJunctionParamTol &&
        squared_distance(sideset, end, x) <= squared_distance(sideset, best_t, x)) {
      best_t = end;
    }
  }

  Projection out;
  out.t = best_t;
  out.p = sideset.at(best_t);
  out.dist = (out.p - x).norm();
  if (!std::isfinite(out.dist) || !std::isfinite(out.t)) {
    throw GeometryError("closest-point projection did not converge on sideset " +
                        std::to_string(sideset.id) + " for x = " + describe(x));
  }
  return out;
}

Projection closest_point_on_boundary(const DomainSpec& domain, const Point& x) {
  if (domain.sidesets.empty()) throw GeometryError("domain '" + domain.name + "' has no sidesets");
  Projection best;
  best.dist = std::numeric_limits<double>::infinity();
  for (const auto& s : domain.sidesets) {
    const Projection p = closest_point(s, x);
    if (p.dist < best.dist) best = p;
  }
  return best;
}

std::vector<int> nearest_sidesets(const DomainSpec& domain, const Point& x) {
  std::vector<Projection> proj;
  proj.reserve(domain.sidesets.size());
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& s : domain.sidesets) {
    proj.push_back(closest_point(s, x));
    dmin = std::min(dmin, proj.back().dist);
  }

  std::vector<int> ids;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i].dist > dmin + kTieDistTol) continue;
    const Sideset& s = domain.sidesets[i];
    ids.push_back(s.id);
    if (proj[i].t <= kJunctionParamTol) ids.push_back(junction_neighbor(domain, s, false));
    if (proj[i].t >= 1.0 - kJunctionParamTol) ids.push_back(junction_neighbor(domain, s, true));
  }
  std::erase(ids, -1);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int assign_sideset(const Point& a, const Point& b, const Point& edge_normal,
                   const DomainSpec& domain) {
  const std::array<Point, 2> ends{a, b};
  std::array<Point, 2> projected;
  std::vector<int> candidates;
  for (int e = 0; e < 2; ++e) {
    projected[e] = closest_point_on_boundary(domain, ends[e]).p;
    const auto ids = nearest_sidesets(domain, ends[e]);
    candidates.insert(candidates.end(), ids.begin(), ids.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  if (candidates.empty()) {
    throw GeometryError("no sideset found for surrogate edge " + describe(a) + " - " + describe(b));
  }
  if (candidates.size() == 1) return candidates.front();

  // Case 2/3: maximise the summed alignment of the edge normal with the
  // sideset normal at both projected endpoints. Scores equal within the tie
  // tolerance are separated by the summed distance of the edge endpoints to
  // the sideset, then by the smaller id (ascending iteration order).
  int winner = candidates.front();
  double best = -std::numeric_limits<double>::infinity();
  double best_gap = std::numeric_limits<double>::infinity();
  for (int id : candidates) {
    const Sideset& s = domain.sideset(id);
    double score = 0.0;
    for (const Point& p : projected) score += edge_normal.dot(s.normal(closest_point(s, p).t));
    const double gap = closest_point(s, a).dist + closest_point(s, b).dist;
    const bool better = score > best + kTieScoreTol;
    const bool tied_closer = std::abs(score - best) <= kTieScoreTol && gap < best_gap - kTieDistTol;
    if (better || tied_closer) {
      best = score;
      best_gap = gap;
      winner = id;
    }
  }
  return winner;
}

DistanceSample distance_vector(const Point& x_tilde, const Sideset& sideset) {
  const Projection p = closest_point(sideset, x_tilde);
  DistanceSample out;
  out.x_tilde = x_tilde;
  out.x = p.p;
  out.d = p.p - x_tilde;
  out.sideset_id = sideset.id;
  out.t = p.t;
  return out;
}

Sideset make_segment(int id, const Point& a, const Point& b) {
  Sideset s;
  s.id = id;
  const Point delta = b - a;
  s.curve = [a, delta](double t) -> Point { return a + t * delta; };
  s.tangent = [delta](double) -> Point { return delta; };
  s.curvature = [](double) -> Point { return Point::Zero(); };
  return s;
}

namespace {
constexpr double kCornerHalfWidth = 0.6;
constexpr double kCornerTop = 0.55;
}  // namespace

DomainSpec make_corner_domain() {
  const double bottom = -std::atan(kCornerHalfWidth);

  DomainSpec dom;
  dom.name = "corner";

  // Right branch y = -atan(x), from C = (0,0) to (0.6, -atan 0.6).
  Sideset right_branch;
  right_branch.id = 0;
  right_branch.curve = [](double t) -> Point {
    const double x = kCornerHalfWidth * t;
    return {x, -std::atan(x)};
  };
  right_branch.tangent = [](double t) -> Point {
    const double x = kCornerHalfWidth * t;
    return {kCornerHalfWidth, -kCornerHalfWidth / (1.0 + x * x)};
  };
  right_branch.curvature = [](double t) -> Point {
    const double x = kCornerHalfWidth * t;
    const double q = 1.0 + x * x;
    return {0.0, 2.0 * kCornerHalfWidth * kCornerHalfWidth * x / (q * q)};
  };

  // Left branch y = atan(x) for x in [-0.6, 0], ending at C.
  Sideset left_branch;
  left_branch.id = 4;
  left_branch.curve = [](double t) -> Point {
    const double x = -kCornerHalfWidth + kCornerHalfWidth * t;
    return {x, std::atan(x)};
  };
  left_branch.tangent = [](double t) -> Point {
    const double x = -kCornerHalfWidth + kCornerHalfWidth * t;
    return {kCornerHalfWidth, kCornerHalfWidth / (1.0 + x * x)};
  };
  left_branch.curvature = [](double t) -> Point {
    const double x = -kCornerHalfWidth + kCornerHalfWidth * t;
    const double q = 1.0 + x * x;
    return {0.0, -2.0 * kCornerHalfWidth * kCornerHalfWidth * x / (q * q)};
  };

  dom.sidesets.push_back(std::move(right_branch));
  dom.sidesets.push_back(make_segment(1, {kCornerHalfWidth, bottom}, {kCornerHalfWidth, kCornerTop}));
  dom.sidesets.push_back(make_segment(2, {kCornerHalfWidth, kCornerTop}, {-kCornerHalfWidth, kCornerTop}));
  dom.sidesets.push_back(make_segment(3, {-kCornerHalfWidth, kCornerTop}, {-kCornerHalfWidth, bottom}));
  dom.sidesets.push_back(std::move(left_branch));

  dom.inside = [](const Point& p) {
    return p.y() >= -std::abs(std::atan(p.x())) - kInsideSlack &&
           p.y() <= kCornerTop + kInsideSlack && std::abs(p.x()) <= kCornerHalfWidth + kInsideSlack;
  };
  // Symmetric in y so that C = (0,0) is a background vertex for every even n:
  // the surrogate boundary then passes through C at every refinement level.
  dom.mesh_box = Box{{-kCornerHalfWidth, -kCornerTop}, {kCornerHalfWidth, kCornerTop}};
  dom.bbox = Box{{-kCornerHalfWidth - 0.05, bottom - 0.05}, {kCornerHalfWidth + 0.05, kCornerTop + 0.05}};
  return dom;
}

DomainSpec make_square_domain() {
  DomainSpec dom;
  dom.name = "square";
  dom.sidesets.push_back(make_segment(0, {0.0, 0.0}, {1.0, 0.0}));
  dom.sidesets.push_back(make_segment(1, {1.0, 0.0}, {1.0, 1.0}));
  dom.sidesets.push_back(make_segment(2, {1.0, 1.0}, {0.0, 1.0}));
  dom.sidesets.push_back(make_segment(3, {0.0, 1.0}, {0.0, 0.0}));
  dom.inside = [](const Point& p) {
    return p.x() >= -kInsideSlack && p.x() <= 1.0 + kInsideSlack && p.y() >= -kInsideSlack &&
           p.y() <= 1.0 + kInsideSlack;
  };
  dom.mesh_box = Box{{0.0, 0.0}, {1.0, 1.0}};
  dom.bbox = Box{{-0.05, -0.05}, {1.05, 1.05}};
  return dom;
}

DomainSpec make_disk_domain(double radius, Point center) {
  if (!(radius > 0.0) || center.x() - radius <= 0.0 || center.x() + radius >= 1.0 ||
      center.y() - radius <= 0.0 || center.y() + radius >= 1.0) {
    throw GeometryError("disk must lie strictly inside the unit square");
  }
  DomainSpec dom;
  dom.name = "disk";
  constexpr double quarter = 0.5 * std::numbers::pi;
  for (int k = 0; k < 4; ++k) {
    const double theta0 = k * quarter;
    Sideset arc;
    arc.id = k;
    arc.curve = [=](double t) -> Point {
      const double th = theta0 + quarter * t;
      return center + radius * Point(std::cos(th), std::sin(th));
    };
    arc.tangent = [=](double t) -> Point {
      const double th = theta0 + quarter * t;
      return radius * quarter * Point(-std::sin(th), std::cos(th));
    };
    arc.curvature = [=](double t) -> Point {
      const double th = theta0 + quarter * t;
      return -radius * quarter * quarter * Point(std::cos(th), std::sin(th));
    };
    dom.sidesets.push_back(std::move(arc));
  }
  dom.inside = [=](const Point& p) { return (p - center).norm() <= radius + kInsideSlack; };
  dom.mesh_box = Box{{0.0, 0.0}, {1.0, 1.0}};
  dom.bbox = dom.mesh_box;
  return dom;
}

std::vector<std::string> domain_catalog() { return {"square", "disk", "disk:<radius>", "corner"}; }

DomainSpec make_domain(const std::string& name) {
  if (name == "square") return make_square_domain();
  if (name == "corner") return make_corner_domain();
  if (name == "disk") return make_disk_domain();
  if (name.rfind("disk:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string arg = name.substr(5);
      const double r = std::stod(arg, &used);
      if (used == arg.size()) return make_disk_domain(r);
    } catch (const std::logic_error&) {
    }
  }
  std::string msg = "unknown domain '" + name + "'; available:";
  for (const auto& d : domain_catalog()) msg += " " + d;
  throw ConfigError(msg);
}

}  // namespace sbm
