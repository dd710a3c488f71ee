#pragma once

#include "sbm/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

struct BoundaryEdge {
  std::array<int, 2> v{};  // counterclockwise order as seen from the owning triangle
  int triangle = -1;
  Point normal = Point::Zero();  // outward unit normal
  double length = 0.0;
  double h = 0.0;  // diameter of the owning triangle
};

/// Conforming P1 triangulation. Triangles are counterclockwise.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<double> h_per_triangle;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
  double total_area() const;
};

struct ShiftConfig {
  double zeta = 0.0;
  double c_d = 1.0;
  bool enabled = false;
};

struct MeshParams {
  double h_gamma = 0.0;
  double h_omega = 0.0;
};

double triangle_area(const Point& a, const Point& b, const Point& c);
double triangle_diameter(const Point& a, const Point& b, const Point& c);
double triangle_inradius(const Point& a, const Point& b, const Point& c);

/// n x n structured grid over `box`, every cell cut along its SW-NE diagonal.
TriMesh build_background(const Box& box, int n);

/// Keeps the triangles whose vertices, edge midpoints and centroid are all
/// inside clos(Omega); unused vertices are dropped.
TriMesh restrict_to_domain(const TriMesh& mesh, const DomainSpec& domain);

/// Boundary edges (edges owned by exactly one triangle) with outward normals.
std::vector<BoundaryEdge> extract_surrogate_boundary(const TriMesh& mesh);

/// Recomputes h_T and the boundary edges from the current vertex positions.
void refresh_geometry(TriMesh& mesh);

/// Moves surrogate-boundary vertices towards Gamma until every boundary
/// quadrature point of every edge satisfies |d| <= c_d h_T^(1+zeta).
/// Incident triangles keep at least 20% of their unshifted area.
TriMesh shift_boundary_nodes(const TriMesh& mesh, const DomainSpec& domain, const ShiftConfig& cfg,
                             int nq_edge = 3);

/// Largest |d| / h_T^(1+zeta) over the boundary quadrature points.
double max_shift_ratio(const TriMesh& mesh, const DomainSpec& domain, double zeta, int nq_edge = 3);

MeshParams mesh_params(const TriMesh& mesh);

/// Legacy ASCII VTK unstructured grid with optional nodal scalar fields.
struct NodalField {
  std::string name;
  std::vector<double> values;
};
void write_vtk(std::ostream& os, const TriMesh& mesh, const std::vector<NodalField>& fields,
               const std::string& title = "sbm surrogate mesh");
void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<NodalField>& fields);

}  // namespace sbm
