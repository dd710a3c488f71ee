#include "sbm/mesh.hpp"

#include "sbm/errors.hpp"
#include "sbm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

namespace sbm {

namespace {

constexpr double kAreaFloor = 0.2;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// Triangles incident to each vertex.
std::vector<std::vector<int>> vertex_to_triangles(const TriMesh& mesh) {
  std::vector<std::vector<int>> out(mesh.num_vertices());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t]) out[v].push_back(static_cast<int>(t));
  }
  return out;
}

double area_of(const TriMesh& mesh, const std::vector<Point>& pos, int t) {
  const auto& tri = mesh.triangles[t];
  return triangle_area(pos[tri[0]], pos[tri[1]], pos[tri[2]]);
}

}  // namespace

double triangle_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double triangle_diameter(const Point& a, const Point& b, const Point& c) {
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

double triangle_inradius(const Point& a, const Point& b, const Point& c) {
  const double perimeter = (b - a).norm() + (c - b).norm() + (a - c).norm();
  return 2.0 * std::abs(triangle_area(a, b, c)) / perimeter;
}

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Point TriMesh::centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < num_triangles(); ++t) sum += signed_area(t);
  return sum;
}

TriMesh build_background(const Box& box, int n) {
  if (n < 2) throw MeshError("build_background: need at least 2 subdivisions per axis");
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw MeshError("build_background: degenerate bounding box");
  }
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  // Convex combinations keep the box edges exact.
  for (int j = 0; j <= n; ++j) {
    const double y = (box.lo.y() * (n - j) + box.hi.y() * j) / n;
    for (int i = 0; i <= n; ++i) {
      const double x = (box.lo.x() * (n - i) + box.hi.x() * i) / n;
      mesh.vertices.emplace_back(x, y);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int sw = id(i, j), se = id(i + 1, j), ne = id(i + 1, j + 1), nw = id(i, j + 1);
      mesh.triangles.push_back({sw, se, ne});
      mesh.triangles.push_back({sw, ne, nw});
    }
  }
  refresh_geometry(mesh);
  return mesh;
}

TriMesh restrict_to_domain(const TriMesh& mesh, const DomainSpec& domain) {
  TriMesh out;
  std::vector<int> remap(mesh.num_vertices(), -1);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& a = mesh.vertices[tri[0]];
    const Point& b = mesh.vertices[tri[1]];
    const Point& c = mesh.vertices[tri[2]];
    const std::array<Point, 7> probes{a, b, c, 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a),
                                      (a + b + c) / 3.0};
    if (!std::all_of(probes.begin(), probes.end(), domain.inside)) continue;
    std::array<int, 3> kept{};
    for (int k = 0; k < 3; ++k) {
      int& m = remap[tri[k]];
      if (m < 0) {
        m = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[tri[k]]);
      }
      kept[k] = m;
    }
    out.triangles.push_back(kept);
  }
  if (out.triangles.empty()) throw MeshError("surrogate domain empty; refine mesh");
  refresh_geometry(out);
  return out;
}

std::vector<BoundaryEdge> extract_surrogate_boundary(const TriMesh& mesh) {
  struct Slot {
    int count = 0;
    int triangle = -1;
    int a = -1, b = -1;
  };
  std::map<std::uint64_t, Slot> edges;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      Slot& s = edges[edge_key(a, b)];
      if (++s.count > 2) {
        throw MeshError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      }
      s.triangle = static_cast<int>(t);
      s.a = a;
      s.b = b;
    }
  }
  std::vector<BoundaryEdge> out;
  for (const auto& [key, s] : edges) {
    if (s.count != 1) continue;
    BoundaryEdge e;
    e.v = {s.a, s.b};
    e.triangle = s.triangle;
    const Point delta = mesh.vertices[s.b] - mesh.vertices[s.a];
    e.length = delta.norm();
    e.normal = Point(delta.y(), -delta.x()) / e.length;
    e.h = mesh.h_per_triangle.empty() ? 0.0 : mesh.h_per_triangle[s.triangle];
    out.push_back(e);
  }
  return out;
}

void refresh_geometry(TriMesh& mesh) {
  mesh.h_per_triangle.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    mesh.h_per_triangle[t] =
        triangle_diameter(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
  }
  mesh.boundary_edges = extract_surrogate_boundary(mesh);
}

double max_shift_ratio(const TriMesh& mesh, const DomainSpec& domain, double zeta, int nq_edge) {
  const auto rule = gauss_legendre(nq_edge);
  double worst = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    const Sideset& s = domain.sideset(assign_sideset(a, b, e.normal, domain));
    const double scale = std::pow(e.h, 1.0 + zeta);
    for (double xi : rule.nodes) {
      const DistanceSample ds = distance_vector(a + xi * (b - a), s);
      worst = std::max(worst, ds.d.norm() / scale);
    }
  }
  return worst;
}

TriMesh shift_boundary_nodes(const TriMesh& mesh, const DomainSpec& domain, const ShiftConfig& cfg,
                             int nq_edge) {
  if (!cfg.enabled) return mesh;
  if (cfg.zeta < 0.0 || cfg.zeta > 1.0) throw MeshError("shift: zeta must lie in [0, 1]");
  if (!(cfg.c_d > 0.0)) throw MeshError("shift: c_d must be positive");

  const auto incident = vertex_to_triangles(mesh);
  std::vector<double> original_area(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) original_area[t] = mesh.signed_area(t);

  std::vector<int> boundary_vertices;
  for (const auto& e : mesh.boundary_edges) {
    boundary_vertices.push_back(e.v[0]);
    boundary_vertices.push_back(e.v[1]);
  }
  std::sort(boundary_vertices.begin(), boundary_vertices.end());
  boundary_vertices.erase(std::unique(boundary_vertices.begin(), boundary_vertices.end()),
                          boundary_vertices.end());

  // The vertex targets are tightened wherever an edge interior still violates
  // the bound (chords bulge away from curved boundaries).
  std::vector<double> tighten(mesh.num_vertices(), 1.0);
  constexpr int kMaxRounds = 40;
  constexpr double kSnapFactor = 0.05;
  for (int round = 0; round < kMaxRounds; ++round) {
    TriMesh out = mesh;
    auto& pos = out.vertices;
    auto floor_ok = [&](int v) {
      return std::all_of(incident[v].begin(), incident[v].end(), [&](int t) {
        return area_of(out, pos, t) >= kAreaFloor * original_area[t];
      });
    };

    for (int v : boundary_vertices) {
      double h_v = 0.0;
      for (int t : incident[v]) {
        const auto& tri = out.triangles[t];
        h_v = std::max(h_v, triangle_diameter(pos[tri[0]], pos[tri[1]], pos[tri[2]]));
      }
      // Repeatedly violating vertices are finally snapped onto Gamma: on a
      // smooth curve split into several sidesets, only chords with both ends
      // on the curve get an unambiguous sideset near a junction.
      const double factor = tighten[v] < kSnapFactor ? 0.0 : tighten[v];
      const double target = factor * cfg.c_d * std::pow(h_v, 1.0 + cfg.zeta);
      const Projection proj = closest_point_on_boundary(domain, pos[v]);
      if (proj.dist <= target) continue;

      const Point start = pos[v];
      const Point goal = proj.p + (start - proj.p) * (target / proj.dist);
      bool moved = false;
      for (double step = 1.0; step > 1e-12; step *= 0.5) {
        pos[v] = start + step * (goal - start);
        if (floor_ok(v)) {
          moved = true;
          break;
        }
      }
      if (!moved) {
        pos[v] = start;
        if (!floor_ok(v)) {
          throw MeshError("shift: vertex " + std::to_string(v) +
                          " cannot keep the incident-area floor even fully damped");
        }
      }
    }
    refresh_geometry(out);

    bool violated = false;
    const auto rule = gauss_legendre(nq_edge);
    for (const auto& e : out.boundary_edges) {
      const Point& a = pos[e.v[0]];
      const Point& b = pos[e.v[1]];
      const Sideset& s = domain.sideset(assign_sideset(a, b, e.normal, domain));
      const double bound = cfg.c_d * std::pow(e.h, 1.0 + cfg.zeta);
      for (double xi : rule.nodes) {
        if (distance_vector(a + xi * (b - a), s).d.norm() > bound) {
          tighten[e.v[0]] *= 0.7;
          tighten[e.v[1]] *= 0.7;
          violated = true;
          break;
        }
      }
    }
    if (!violated) return out;
  }
  throw MeshError("shift: d-smallness bound not reached after repeated tightening");
}

MeshParams mesh_params(const TriMesh& mesh) {
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  for (const auto& e : mesh.boundary_edges) on_boundary[e.v[0]] = on_boundary[e.v[1]] = 1;
  MeshParams p;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double h = mesh.h_per_triangle[t];
    p.h_omega = std::max(p.h_omega, h);
    const auto& tri = mesh.triangles[t];
    if (on_boundary[tri[0]] || on_boundary[tri[1]] || on_boundary[tri[2]]) {
      p.h_gamma = std::max(p.h_gamma, h);
    }
  }
  return p;
}

void write_vtk(std::ostream& os, const TriMesh& mesh, const std::vector<NodalField>& fields,
               const std::string& title) {
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_triangles();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os.precision(17);
  os << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices) os << p.x() << " " << p.y() << " 0\n";
  os << "CELLS " << nt << " " << 4 * nt << "\n";
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "CELL_TYPES " << nt << "\n";
  for (std::size_t t = 0; t < nt; ++t) os << "5\n";
  if (fields.empty()) return;
  os << "POINT_DATA " << nv << "\n";
  for (const auto& f : fields) {
    if (f.values.size() != nv) throw MeshError("VTK field '" + f.name + "' has wrong length");
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) os << v << "\n";
  }
}

void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<NodalField>& fields) {
  std::ofstream os(path);
  if (!os) throw MeshError("cannot open '" + path + "' for writing");
  write_vtk(os, mesh, fields);
}

}  // namespace sbm
