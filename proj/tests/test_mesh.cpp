#include "sbm/errors.hpp"
#include "sbm/geometry.hpp"
#include "sbm/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

namespace {

using sbm::Point;

const sbm::Box kUnit{{0.0, 0.0}, {1.0, 1.0}};

// Dense-sampling inclusion oracle: a 20 x 20 barycentric lattice (231 points)
// plus a fine sampling of the three edges.
bool triangle_inside_oracle(const Point& a, const Point& b, const Point& c,
                            const sbm::DomainSpec& dom) {
  const int m = 20;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; i + j <= m; ++j) {
      const double l1 = static_cast<double>(i) / m;
      const double l2 = static_cast<double>(j) / m;
      if (!dom.inside((1 - l1 - l2) * a + l1 * b + l2 * c)) return false;
    }
  }
  return true;
}

TEST(Background, CountsAndSize) {
  const auto mesh = sbm::build_background(kUnit, 2);
  EXPECT_EQ(mesh.num_triangles(), 8u);
  EXPECT_EQ(mesh.num_vertices(), 9u);
  const auto m4 = sbm::build_background(kUnit, 4);
  double hmax = 0.0;
  for (double h : m4.h_per_triangle) hmax = std::max(hmax, h);
  EXPECT_NEAR(hmax, std::sqrt(2.0) / 4, 1e-15);
  EXPECT_THROW(sbm::build_background(kUnit, 1), sbm::MeshError);
  EXPECT_THROW(sbm::build_background(sbm::Box{{0, 0}, {1, 0}}, 4), sbm::MeshError);
}

TEST(Background, PartitionsTheBox) {
  const sbm::Box box{{-0.6, -0.55}, {0.6, 0.55}};
  const auto mesh = sbm::build_background(box, 12);
  EXPECT_NEAR(mesh.total_area(), box.width() * box.height(), 1e-12);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    EXPECT_GE(mesh.signed_area(t), 1e-14);
    const auto& tri = mesh.triangles[t];
    const auto& v = mesh.vertices;
    EXPECT_LE(mesh.h_per_triangle[t] / sbm::triangle_inradius(v[tri[0]], v[tri[1]], v[tri[2]]), 10.0);
  }
}

TEST(Restrict, FullBoxKeepsEverything) {
  const auto square = sbm::make_square_domain();
  const auto bg = sbm::build_background(kUnit, 6);
  const auto mesh = sbm::restrict_to_domain(bg, square);
  EXPECT_EQ(mesh.num_triangles(), bg.num_triangles());
  EXPECT_EQ(mesh.num_vertices(), bg.num_vertices());
}

TEST(Restrict, DiskMatchesDenseSamplingOracle) {
  const auto disk = sbm::make_disk_domain(0.4);
  for (int n : {4, 8, 16, 32}) {
    const auto bg = sbm::build_background(kUnit, n);
    std::size_t expected = 0;
    for (const auto& tri : bg.triangles) {
      if (triangle_inside_oracle(bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]], disk)) {
        ++expected;
      }
    }
    if (expected == 0) {
      EXPECT_THROW(sbm::restrict_to_domain(bg, disk), sbm::MeshError);
      continue;
    }
    const auto mesh = sbm::restrict_to_domain(bg, disk);
    EXPECT_EQ(mesh.num_triangles(), expected) << "n=" << n;
    for (const auto& tri : mesh.triangles) {
      for (int k = 0; k < 3; ++k) EXPECT_TRUE(disk.inside(mesh.vertices[tri[k]]));
    }
  }
}

TEST(Restrict, EmptySurrogateIsAnError) {
  const auto disk = sbm::make_disk_domain(0.1);
  try {
    sbm::restrict_to_domain(sbm::build_background(kUnit, 2), disk);
    FAIL() << "expected MeshError";
  } catch (const sbm::MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("surrogate domain empty; refine mesh"), std::string::npos);
  }
}

TEST(Restrict, Idempotent) {
  const auto corner = sbm::make_corner_domain();
  const auto once = sbm::restrict_to_domain(sbm::build_background(corner.mesh_box, 20), corner);
  const auto twice = sbm::restrict_to_domain(once, corner);
  EXPECT_EQ(once.triangles, twice.triangles);
  EXPECT_EQ(once.vertices, twice.vertices);
}

TEST(Restrict, AreaMonotoneUnderRefinement) {
  for (const auto& dom : {sbm::make_disk_domain(), sbm::make_corner_domain()}) {
    double prev = 0.0;
    for (int n : {8, 16, 32, 64, 128}) {
      const auto mesh = sbm::restrict_to_domain(sbm::build_background(dom.mesh_box, n), dom);
      EXPECT_GE(mesh.total_area(), prev - 1e-12) << dom.name << " n=" << n;
      prev = mesh.total_area();
    }
  }
}

TEST(Boundary, PerimeterOfFullBox) {
  const auto mesh = sbm::build_background(kUnit, 2);
  const auto edges = sbm::extract_surrogate_boundary(mesh);
  ASSERT_EQ(edges.size(), 8u);
  double perimeter = 0.0;
  for (const auto& e : edges) {
    perimeter += e.length;
    const Point mid = 0.5 * (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]);
    EXPECT_TRUE(std::abs(mid.x()) < 1e-15 || std::abs(mid.x() - 1) < 1e-15 ||
                std::abs(mid.y()) < 1e-15 || std::abs(mid.y() - 1) < 1e-15);
  }
  EXPECT_NEAR(perimeter, 4.0, 1e-14);
}

TEST(Boundary, OrientationAndClosure) {
  for (const auto& dom : {sbm::make_disk_domain(), sbm::make_corner_domain()}) {
    const auto mesh = sbm::restrict_to_domain(sbm::build_background(dom.mesh_box, 24), dom);
    Point sum = Point::Zero();
    std::set<std::pair<int, int>> seen;
    for (const auto& e : mesh.boundary_edges) {
      sum += e.length * e.normal;
      EXPECT_NEAR(e.normal.norm(), 1.0, 1e-14);
      const auto& tri = mesh.triangles[e.triangle];
      int hits = 0;
      for (int k = 0; k < 3; ++k) hits += (tri[k] == e.v[0]) + (tri[k] == e.v[1]);
      EXPECT_EQ(hits, 2);
      const Point mid = 0.5 * (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]);
      EXPECT_LT(e.normal.dot(mesh.centroid(e.triangle) - mid), 0.0);
      EXPECT_DOUBLE_EQ(e.h, mesh.h_per_triangle[e.triangle]);
      EXPECT_TRUE(seen.insert({std::min(e.v[0], e.v[1]), std::max(e.v[0], e.v[1])}).second);
    }
    EXPECT_LE(sum.norm(), 1e-10) << dom.name;
  }
}

TEST(Boundary, DiskPerimeterBound) {
  // Within each quadrant the surrogate boundary of a convex domain is a
  // monotone path built from axis-parallel and diagonal edges, so its length
  // is bounded by the axis-parallel staircase, 8 r; it does not converge to
  // 2 pi r. An upper bound of 2 pi r + O(h) cannot hold for this mesh family.
  const double r = 0.45;
  const auto disk = sbm::make_disk_domain(r);
  for (int n : {16, 32, 64, 128}) {
    const auto mesh = sbm::restrict_to_domain(sbm::build_background(kUnit, n), disk);
    double perimeter = 0.0;
    for (const auto& e : mesh.boundary_edges) perimeter += e.length;
    EXPECT_LE(perimeter, 8 * r) << "n=" << n;
    EXPECT_GE(perimeter, 2 * M_PI * (r - sbm::mesh_params(mesh).h_gamma)) << "n=" << n;
  }
}

TEST(Boundary, NonManifoldEdgeRejected) {
  sbm::TriMesh mesh;
  mesh.vertices = {Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1), Point(0.5, -1)};
  mesh.triangles = {{0, 1, 2}, {1, 3, 2}, {0, 4, 1}, {0, 1, 3}};
  EXPECT_THROW(sbm::extract_surrogate_boundary(mesh), sbm::MeshError);
}

TEST(MeshParams, UniformAndHalving) {
  const auto full = sbm::build_background(kUnit, 8);
  const auto p = sbm::mesh_params(full);
  EXPECT_NEAR(p.h_gamma, std::sqrt(2.0) / 8, 1e-15);
  EXPECT_NEAR(p.h_omega, std::sqrt(2.0) / 8, 1e-15);
  const auto disk = sbm::make_disk_domain();
  const auto p8 = sbm::mesh_params(sbm::restrict_to_domain(sbm::build_background(kUnit, 8), disk));
  const auto p16 = sbm::mesh_params(sbm::restrict_to_domain(sbm::build_background(kUnit, 16), disk));
  EXPECT_NEAR(p8.h_omega / p16.h_omega, 2.0, 1e-12);
  EXPECT_LE(p16.h_gamma, p16.h_omega);
}

TEST(Shift, HugeToleranceLeavesMeshUnchanged) {
  const auto disk = sbm::make_disk_domain();
  const auto mesh = sbm::restrict_to_domain(sbm::build_background(kUnit, 16), disk);
  const auto shifted = sbm::shift_boundary_nodes(mesh, disk, {0.0, 1e6, true});
  EXPECT_EQ(shifted.vertices, mesh.vertices);
}

TEST(Shift, EnforcesDistanceBoundAndAreaFloor) {
  const auto disk = sbm::make_disk_domain();
  for (int n : {16, 32, 64}) {
    const auto mesh = sbm::restrict_to_domain(sbm::build_background(kUnit, n), disk);
    const sbm::ShiftConfig cfg{0.5, 1.0, true};
    const auto shifted = sbm::shift_boundary_nodes(mesh, disk, cfg);
    EXPECT_LE(sbm::max_shift_ratio(shifted, disk, 0.5), 1.0 + 1e-9) << "n=" << n;
    ASSERT_EQ(shifted.num_triangles(), mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      EXPECT_GE(shifted.signed_area(t), 0.2 * mesh.signed_area(t));
    }
    // Interior vertices never move; h is recomputed from moved vertices.
    const auto p = sbm::mesh_params(shifted);
    for (std::size_t t = 0; t < shifted.num_triangles(); ++t) {
      const auto& tri = shifted.triangles[t];
      const auto& v = shifted.vertices;
      EXPECT_DOUBLE_EQ(shifted.h_per_triangle[t], sbm::triangle_diameter(v[tri[0]], v[tri[1]], v[tri[2]]));
    }
    EXPECT_GT(p.h_omega, 0.0);
  }
}

TEST(Shift, CompliantVerticesStayPut) {
  const auto square = sbm::make_square_domain();
  const auto mesh = sbm::build_background(kUnit, 8);
  const auto shifted = sbm::shift_boundary_nodes(mesh, square, {0.5, 1.0, true});
  EXPECT_EQ(shifted.vertices, mesh.vertices);
}

TEST(Vtk, LegacyAsciiLayout) {
  const auto mesh = sbm::build_background(kUnit, 2);
  std::ostringstream os;
  sbm::write_vtk(os, mesh, {{"u_h", std::vector<double>(9, 1.5)}});
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0", 0), 0u);
  EXPECT_NE(s.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
  EXPECT_NE(s.find("POINTS 9 double"), std::string::npos);
  EXPECT_NE(s.find("CELLS 8 32"), std::string::npos);
  EXPECT_NE(s.find("CELL_TYPES 8"), std::string::npos);
  EXPECT_NE(s.find("POINT_DATA 9"), std::string::npos);
  EXPECT_NE(s.find("SCALARS u_h double 1"), std::string::npos);
  EXPECT_THROW(sbm::write_vtk(os, mesh, {{"bad", {1.0}}}), sbm::MeshError);
}

}  // namespace
