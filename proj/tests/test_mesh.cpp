#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bem/mesh.hpp"
#include "doctest.h"

using namespace bem;
using Eigen::Vector3d;

TEST_CASE("icosphere counts, topology and shape") {
  long prev_tris = 5;
  double prev_h = 2.0;
  for (int level = 0; level <= 3; ++level) {
    const TriangleSurfaceMesh m = make_icosphere(level);
    CHECK(m.num_triangles() == prev_tris * 4);
    prev_tris = m.num_triangles();
    // V - E + F = 2 with E = 3F/2 for a closed triangle surface
    CHECK(m.num_vertices() == 2 + m.num_triangles() / 2);

    const MeshDiagnostics d = validate(m);
    CHECK(d.closed);
    CHECK(d.oriented);
    CHECK(d.euler_characteristic == 2);
    CHECK(d.aspect_min >= 1.0 - 1e-12);
    CHECK(d.aspect_max <= 1.4);

    for (long v = 0; v < m.num_vertices(); ++v)
      CHECK(m.vertex(v).norm() == doctest::Approx(1.0).epsilon(1e-12));

    const double h = mesh_size(m);
    CHECK(h < prev_h);
    prev_h = h;
  }
  CHECK(mesh_size(make_icosphere(1)) == doctest::Approx(0.6180339887).epsilon(1e-9));
  CHECK(mesh_size(make_icosphere(2)) == doctest::Approx(0.3249196962).epsilon(1e-9));
  CHECK(mesh_size(make_icosphere(3)) == doctest::Approx(0.1646471601).epsilon(1e-9));

  // area approaches the sphere from below
  const double a2 = make_icosphere(2).total_area();
  const double a3 = make_icosphere(3).total_area();
  CHECK(a2 < a3);
  CHECK(a3 < 4.0 * M_PI);
  CHECK(a3 > 0.99 * 4.0 * M_PI);

  CHECK_THROWS_AS(make_icosphere(-1), std::invalid_argument);
  CHECK_THROWS_AS(make_icosphere(9), std::invalid_argument);
}

TEST_CASE("per-triangle geometry is consistent") {
  const TriangleSurfaceMesh m = make_icosphere(1);
  for (long t = 0; t < m.num_triangles(); ++t) {
    const Vector3d e1 = m.corner(t, 1) - m.corner(t, 0);
    const Vector3d e2 = m.corner(t, 2) - m.corner(t, 0);
    const Vector3d n = e1.cross(e2);
    CHECK(m.jacobian(t) == doctest::Approx(n.norm()).epsilon(1e-13));
    CHECK(m.area(t) == doctest::Approx(0.5 * n.norm()).epsilon(1e-13));
    CHECK((m.normal(t) - n.normalized()).norm() < 1e-13);
    // sphere mesh: outward normals
    CHECK(m.normal(t).dot(m.centroid(t)) > 0.0);
    // P1 surface-curl rows: sum to zero, tangential, length |e_opp|/(2A)
    Vector3d sum = Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
      const Vector3d c = m.curl(t, k);
      sum += c;
      CHECK(std::abs(c.dot(m.normal(t))) < 1e-12);
      const Vector3d eopp = m.corner(t, (k + 2) % 3) - m.corner(t, (k + 1) % 3);
      CHECK(c.norm() ==
            doctest::Approx(eopp.norm() / (2.0 * m.area(t))).epsilon(1e-12));
    }
    CHECK(sum.norm() < 1e-12);
  }
}

TEST_CASE("region tagging") {
  const TriangleSurfaceMesh m =
      tag_regions(make_icosphere(1), WholeBoundary{Region::Robin});
  for (long t = 0; t < m.num_triangles(); ++t)
    CHECK(m.region(t) == Region::Robin);

  const TriangleSurfaceMesh hm = tag_regions(make_icosphere(1), HalfspaceX{});
  long nd = 0, nn = 0;
  for (long t = 0; t < hm.num_triangles(); ++t) {
    if (hm.region(t) == Region::Neumann) {
      ++nn;
      CHECK(hm.centroid(t).x() > 0.0);
    } else {
      ++nd;
      CHECK(hm.centroid(t).x() < 0.0);
    }
  }
  // poles on the x axis make the two halves congruent
  CHECK(nd == nn);
  CHECK(nd + nn == hm.num_triangles());

  // a rotated sphere has triangles straddling x = 0
  const TriangleSurfaceMesh base = make_icosphere(1);
  TriangleSurfaceMesh::Points rot = base.vertices();
  const double c = std::cos(0.3), s = std::sin(0.3);
  for (long v = 0; v < rot.rows(); ++v) {
    const double x = rot(v, 0), y = rot(v, 1);
    rot(v, 0) = c * x - s * y;
    rot(v, 1) = s * x + c * y;
  }
  TriangleSurfaceMesh tilted(rot, base.triangles());
  CHECK_THROWS_AS(tag_regions(std::move(tilted), HalfspaceX{}),
                  std::runtime_error);
}

TEST_CASE("constructor guards") {
  TriangleSurfaceMesh::Points v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  TriangleSurfaceMesh::Tris t(1, 3);
  t << 0, 1, 2;
  const TriangleSurfaceMesh ok(v, t);
  CHECK(ok.region(0) == Region::Dirichlet);  // default label

  TriangleSurfaceMesh::Tris degen(1, 3);
  degen << 0, 1, 1;
  CHECK_THROWS_AS(TriangleSurfaceMesh(v, degen), std::invalid_argument);

  CHECK_THROWS_AS(TriangleSurfaceMesh(v, t, {Region::Dirichlet, Region::Robin}),
                  std::invalid_argument);

  TriangleSurfaceMesh relabel(v, t);
  CHECK_THROWS_AS(relabel.set_region({}), std::invalid_argument);
  relabel.set_region({Region::Neumann});
  CHECK(relabel.region(0) == Region::Neumann);
}

TEST_CASE("ascii mesh format round-trips") {
  const TriangleSurfaceMesh m = tag_regions(make_icosphere(1), HalfspaceX{});
  std::stringstream buf;
  save_mesh(m, buf);
  const TriangleSurfaceMesh back = load_mesh(buf);
  REQUIRE(back.num_vertices() == m.num_vertices());
  REQUIRE(back.num_triangles() == m.num_triangles());
  CHECK((back.vertices() - m.vertices()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.triangles() - m.triangles()).cwiseAbs().maxCoeff() == 0);
  for (long t = 0; t < m.num_triangles(); ++t)
    CHECK(back.region(t) == m.region(t));

  std::stringstream bad("not a mesh\n");
  CHECK_THROWS_AS(load_mesh(bad), std::runtime_error);

  std::stringstream truncated("4 1\n0 0 0\n");
  CHECK_THROWS_AS(load_mesh(truncated), std::runtime_error);
}
