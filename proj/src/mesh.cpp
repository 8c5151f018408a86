#include "bem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace bem {

const char* region_name(Region r) {
  switch (r) {
    case Region::Dirichlet: return "dirichlet";
    case Region::Neumann: return "neumann";
    case Region::Robin: return "robin";
  }
  return "?";
}

TriangleSurfaceMesh::TriangleSurfaceMesh(Points vertices, Tris triangles,
                                         std::vector<Region> region)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const long nt = triangles_.rows();
  if (region.empty()) {
    region_.assign(static_cast<size_t>(nt), Region::Dirichlet);
  } else {
    if (static_cast<long>(region.size()) != nt)
      throw std::invalid_argument("region label count != triangle count");
    region_ = std::move(region);
  }
  normals_.resize(nt, 3);
  centroids_.resize(nt, 3);
  area_.resize(nt);
  area2_.resize(nt);
  diam_.resize(nt);
  curl_.resize(nt, 9);
  for (long t = 0; t < nt; ++t) {
    const Eigen::Vector3d p0 = vertices_.row(triangles_(t, 0));
    const Eigen::Vector3d p1 = vertices_.row(triangles_(t, 1));
    const Eigen::Vector3d p2 = vertices_.row(triangles_(t, 2));
    const Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    const double j = n.norm();
    if (j <= 0.0) throw std::invalid_argument("degenerate triangle");
    area2_[t] = j;
    area_[t] = 0.5 * j;
    normals_.row(t) = n / j;
    centroids_.row(t) = (p0 + p1 + p2) / 3.0;
    diam_[t] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    // curl of barycentric basis k is -e_opp(k)/(2A); e_opp(0) = p2-p1 etc.
    curl_.row(t).segment<3>(0) = -(p2 - p1) / j;
    curl_.row(t).segment<3>(3) = -(p0 - p2) / j;
    curl_.row(t).segment<3>(6) = -(p1 - p0) / j;
  }
}

void TriangleSurfaceMesh::set_region(std::vector<Region> region) {
  if (static_cast<long>(region.size()) != num_triangles())
    throw std::invalid_argument("region label count != triangle count");
  region_ = std::move(region);
}

namespace {

// Icosahedron with two vertices at (+-1,0,0); vertex rings at x = +-1/sqrt(5).
void icosahedron_pole_x(TriangleSurfaceMesh::Points& V,
                        TriangleSurfaceMesh::Tris& T) {
  V.resize(12, 3);
  const double r = 2.0 / std::sqrt(5.0);
  const double xr = 1.0 / std::sqrt(5.0);
  V.row(0) << 1.0, 0.0, 0.0;
  for (int j = 0; j < 5; ++j) {
    const double a = 2.0 * M_PI * j / 5.0;
    V.row(1 + j) << xr, r * std::cos(a), r * std::sin(a);
  }
  for (int j = 0; j < 5; ++j) {
    const double a = 2.0 * M_PI * j / 5.0 + M_PI / 5.0;
    V.row(6 + j) << -xr, r * std::cos(a), r * std::sin(a);
  }
  V.row(11) << -1.0, 0.0, 0.0;
  T.resize(20, 3);
  int row = 0;
  for (int j = 0; j < 5; ++j) {
    const int jn = (j + 1) % 5;
    T.row(row++) << 0, 1 + j, 1 + jn;
    T.row(row++) << 1 + j, 6 + j, 1 + jn;
    T.row(row++) << 6 + j, 6 + jn, 1 + jn;
    T.row(row++) << 11, 6 + jn, 6 + j;
  }
}

}  // namespace

TriangleSurfaceMesh make_icosphere(int level) {
  if (level < 0) throw std::invalid_argument("icosphere level must be >= 0");
  if (level > 8)
    throw std::invalid_argument("icosphere level above desk-scale guard (8)");
  TriangleSurfaceMesh::Points V;
  TriangleSurfaceMesh::Tris T;
  icosahedron_pole_x(V, T);
  for (int s = 0; s < level; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    std::vector<Eigen::Vector3d> verts;
    verts.reserve(static_cast<size_t>(V.rows()) * 3);
    for (long v = 0; v < V.rows(); ++v) verts.emplace_back(V.row(v));
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = verts[a] + verts[b];
      m.normalize();
      const int id = static_cast<int>(verts.size());
      verts.push_back(m);
      midpoint.emplace(key, id);
      return id;
    };
    TriangleSurfaceMesh::Tris newT(4 * T.rows(), 3);
    long row = 0;
    for (long t = 0; t < T.rows(); ++t) {
      const int a = T(t, 0), b = T(t, 1), c = T(t, 2);
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      newT.row(row++) << a, ab, ca;
      newT.row(row++) << b, bc, ab;
      newT.row(row++) << c, ca, bc;
      newT.row(row++) << ab, bc, ca;
    }
    V.resize(static_cast<long>(verts.size()), 3);
    for (size_t v = 0; v < verts.size(); ++v) V.row(static_cast<long>(v)) = verts[v];
    T = newT;
  }
  // orient outward: star-shaped about the origin
  for (long t = 0; t < T.rows(); ++t) {
    const Eigen::Vector3d p0 = V.row(T(t, 0));
    const Eigen::Vector3d p1 = V.row(T(t, 1));
    const Eigen::Vector3d p2 = V.row(T(t, 2));
    const Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    if (n.dot(p0 + p1 + p2) < 0.0) std::swap(T(t, 1), T(t, 2));
  }
  return TriangleSurfaceMesh(std::move(V), std::move(T));
}

double mesh_size(const TriangleSurfaceMesh& mesh) {
  if (mesh.num_triangles() == 0) throw std::invalid_argument("empty mesh");
  double h = 0.0;
  for (long t = 0; t < mesh.num_triangles(); ++t)
    h = std::max(h, mesh.diameter(t));
  return h;
}

TriangleSurfaceMesh tag_regions(TriangleSurfaceMesh mesh, WholeBoundary rule) {
  mesh.set_region(std::vector<Region>(
      static_cast<size_t>(mesh.num_triangles()), rule.label));
  return mesh;
}

TriangleSurfaceMesh tag_regions(TriangleSurfaceMesh mesh, HalfspaceX rule) {
  const double tol = 1e-12 * mesh_size(mesh);
  long straddling = 0;
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    bool pos = false, neg = false;
    for (int k = 0; k < 3; ++k) {
      const double x = mesh.corner(t, k).x();
      pos = pos || (x > tol);
      neg = neg || (x < -tol);
    }
    if (pos && neg) ++straddling;
  }
  if (straddling > 0) {
    std::ostringstream msg;
    msg << "unfitted mesh: " << straddling
        << " triangles straddle the plane x = 0";
    throw std::runtime_error(msg.str());
  }
  std::vector<Region> region(static_cast<size_t>(mesh.num_triangles()));
  for (long t = 0; t < mesh.num_triangles(); ++t)
    region[static_cast<size_t>(t)] =
        mesh.centroid(t).x() > 0.0 ? rule.positive : rule.negative;
  mesh.set_region(std::move(region));
  return mesh;
}

MeshDiagnostics validate(const TriangleSurfaceMesh& mesh) {
  MeshDiagnostics d;
  // edge -> list of directed occurrences
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    const int a = mesh.triangles()(t, 0);
    const int b = mesh.triangles()(t, 1);
    const int c = mesh.triangles()(t, 2);
    for (auto [u, v] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}})
      edges[std::minmax(u, v)].emplace_back(u, v);
  }
  d.closed = true;
  d.oriented = true;
  for (const auto& [key, occ] : edges) {
    if (occ.size() != 2) {
      d.closed = false;
      d.oriented = false;
      continue;
    }
    if (occ[0].first != occ[1].second || occ[0].second != occ[1].first)
      d.oriented = false;
  }
  d.euler_characteristic = mesh.num_vertices() -
                           static_cast<long>(edges.size()) +
                           mesh.num_triangles();
  d.aspect_min = std::numeric_limits<double>::infinity();
  d.aspect_max = 0.0;
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    const Eigen::Vector3d p0 = mesh.corner(t, 0);
    const Eigen::Vector3d p1 = mesh.corner(t, 1);
    const Eigen::Vector3d p2 = mesh.corner(t, 2);
    const double e0 = (p1 - p0).norm();
    const double e1 = (p2 - p1).norm();
    const double e2 = (p0 - p2).norm();
    const double ratio = std::max({e0, e1, e2}) / std::min({e0, e1, e2});
    d.aspect_min = std::min(d.aspect_min, ratio);
    d.aspect_max = std::max(d.aspect_max, ratio);
  }
  return d;
}

void save_mesh(const TriangleSurfaceMesh& mesh, std::ostream& out) {
  out.precision(17);
  out << mesh.num_vertices() << " " << mesh.num_triangles() << "\n";
  for (long v = 0; v < mesh.num_vertices(); ++v)
    out << mesh.vertices()(v, 0) << " " << mesh.vertices()(v, 1) << " "
        << mesh.vertices()(v, 2) << "\n";
  for (long t = 0; t < mesh.num_triangles(); ++t)
    out << mesh.triangles()(t, 0) << " " << mesh.triangles()(t, 1) << " "
        << mesh.triangles()(t, 2) << " "
        << static_cast<int>(mesh.region()[static_cast<size_t>(t)]) << "\n";
}

TriangleSurfaceMesh load_mesh(std::istream& in) {
  long nv = 0, nt = 0;
  if (!(in >> nv >> nt) || nv <= 0 || nt <= 0)
    throw std::runtime_error("mesh load: bad header");
  TriangleSurfaceMesh::Points V(nv, 3);
  for (long v = 0; v < nv; ++v)
    if (!(in >> V(v, 0) >> V(v, 1) >> V(v, 2)))
      throw std::runtime_error("mesh load: truncated vertex block");
  TriangleSurfaceMesh::Tris T(nt, 3);
  std::vector<Region> region(static_cast<size_t>(nt), Region::Dirichlet);
  std::string line;
  std::getline(in, line);  // consume end of last vertex line
  for (long t = 0; t < nt; ++t) {
    if (!std::getline(in, line))
      throw std::runtime_error("mesh load: truncated triangle block");
    std::istringstream ls(line);
    int r = 0;
    if (!(ls >> T(t, 0) >> T(t, 1) >> T(t, 2)))
      throw std::runtime_error("mesh load: bad triangle line");
    if (ls >> r) region[static_cast<size_t>(t)] = static_cast<Region>(r);
    for (int k = 0; k < 3; ++k)
      if (T(t, k) < 0 || T(t, k) >= nv)
        throw std::runtime_error("mesh load: vertex index out of range");
  }
  return TriangleSurfaceMesh(std::move(V), std::move(T), std::move(region));
}

void save_mesh_file(const TriangleSurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_mesh(mesh, out);
}

TriangleSurfaceMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_mesh(in);
}

}  // namespace bem
