#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bem {

enum class Region : std::uint8_t { Dirichlet = 0, Neumann = 1, Robin = 2 };

const char* region_name(Region r);

struct MeshDiagnostics {
  bool closed = false;
  bool oriented = false;
  long euler_characteristic = 0;
  double aspect_min = 0.0;  // longest/shortest edge per triangle
  double aspect_max = 0.0;
};

// Closed oriented triangulated surface with per-triangle region labels.
// All per-triangle geometry (normal, area, centroid, curl coefficients) is
// precomputed in the constructor; instances are immutable afterwards and
// safe to share across threads.
class TriangleSurfaceMesh {
 public:
  using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
  using Tris = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

  TriangleSurfaceMesh(Points vertices, Tris triangles,
                      std::vector<Region> region = {});

  long num_vertices() const { return vertices_.rows(); }
  long num_triangles() const { return triangles_.rows(); }

  const Points& vertices() const { return vertices_; }
  const Tris& triangles() const { return triangles_; }
  const std::vector<Region>& region() const { return region_; }
  Region region(long t) const { return region_[static_cast<size_t>(t)]; }

  Eigen::Vector3d vertex(long v) const { return vertices_.row(v); }
  Eigen::Vector3d corner(long t, int k) const {
    return vertices_.row(triangles_(t, k));
  }

  // per-triangle geometry
  Eigen::Vector3d normal(long t) const { return normals_.row(t); }
  double area(long t) const { return area_[t]; }
  double jacobian(long t) const { return area2_[t]; }  // 2*area
  Eigen::Vector3d centroid(long t) const { return centroids_.row(t); }
  double diameter(long t) const { return diam_[t]; }

  // surface-curl coefficient of the local P1 basis function k on triangle t:
  // curl_G(phi_k) = -e_opp(k) / (2A), constant per triangle
  Eigen::Vector3d curl(long t, int k) const {
    return curl_.row(t).segment<3>(3 * k);
  }

  double total_area() const { return area_.sum(); }

  void set_region(std::vector<Region> region);

 private:
  Points vertices_;
  Tris triangles_;
  std::vector<Region> region_;
  Points normals_;
  Points centroids_;
  Eigen::VectorXd area_;
  Eigen::VectorXd area2_;
  Eigen::VectorXd diam_;
  Eigen::Matrix<double, Eigen::Dynamic, 9, Eigen::RowMajor> curl_;
};

// Icosahedron with poles on the x axis, subdivided `level` times with all
// vertices projected to the unit sphere. For level >= 1 no triangle
// straddles the plane x = 0, so half-space region tagging is always fitted.
// Guard: level <= 8.
TriangleSurfaceMesh make_icosphere(int level);

// h = maximum edge length over all triangles ("largest element diameter").
double mesh_size(const TriangleSurfaceMesh& mesh);

// Region assignment rules. HalfspaceX tags Neumann where centroid.x > 0 and
// `negative` elsewhere; it requires a fitted mesh (no triangle with vertices
// strictly on both sides of x = 0, tolerance 1e-12*h).
struct WholeBoundary {
  Region label = Region::Dirichlet;
};
struct HalfspaceX {
  Region positive = Region::Neumann;
  Region negative = Region::Dirichlet;
};

TriangleSurfaceMesh tag_regions(TriangleSurfaceMesh mesh, WholeBoundary rule);
TriangleSurfaceMesh tag_regions(TriangleSurfaceMesh mesh, HalfspaceX rule);

MeshDiagnostics validate(const TriangleSurfaceMesh& mesh);

// ASCII mesh format (documented in README): header line "nv nt", nv vertex
// lines "x y z", nt triangle lines "a b c [region]".
void save_mesh(const TriangleSurfaceMesh& mesh, std::ostream& out);
TriangleSurfaceMesh load_mesh(std::istream& in);
void save_mesh_file(const TriangleSurfaceMesh& mesh, const std::string& path);
TriangleSurfaceMesh load_mesh_file(const std::string& path);

}  // namespace bem
