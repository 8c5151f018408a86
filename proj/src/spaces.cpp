#include "bem/spaces.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bem {

Family family_from_string(const std::string& name) {
  if (name == "P1-continuous" || name == "p1c") return Family::P1Continuous;
  if (name == "P0-discontinuous" || name == "p0") return Family::P0Discontinuous;
  if (name == "P1-discontinuous" || name == "p1d") return Family::P1Discontinuous;
  throw std::invalid_argument("unsupported space family: " + name);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::P1Continuous: return "P1-continuous";
    case Family::P0Discontinuous: return "P0-discontinuous";
    case Family::P1Discontinuous: return "P1-discontinuous";
  }
  return "?";
}

FunctionSpace::FunctionSpace(const TriangleSurfaceMesh& mesh, Family family)
    : mesh_(&mesh), family_(family) {
  const long nt = mesh.num_triangles();
  l2g_.resize(nt, 3);
  switch (family) {
    case Family::P1Continuous:
      dof_count_ = mesh.num_vertices();
      nloc_ = 3;
      for (long t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) l2g_(t, k) = mesh.triangles()(t, k);
      break;
    case Family::P0Discontinuous:
      dof_count_ = nt;
      nloc_ = 1;
      for (long t = 0; t < nt; ++t) {
        l2g_(t, 0) = t;
        l2g_(t, 1) = l2g_(t, 2) = -1;
      }
      break;
    case Family::P1Discontinuous:
      dof_count_ = 3 * nt;
      nloc_ = 3;
      for (long t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) l2g_(t, k) = 3 * t + k;
      break;
  }
}

Eigen::Vector3d FunctionSpace::node(long t, int k) const {
  if (family_ == Family::P0Discontinuous) return mesh_->centroid(t);
  return mesh_->corner(t, k);
}

FunctionSpace build_space(const TriangleSurfaceMesh& mesh, Family family) {
  return FunctionSpace(mesh, family);
}

SparseMatrix assemble_mass(const FunctionSpace& test,
                           const FunctionSpace& trial,
                           std::optional<std::set<Region>> regions) {
  if (&test.mesh() != &trial.mesh())
    throw std::invalid_argument("assemble_mass: spaces on different meshes");
  const TriangleSurfaceMesh& mesh = test.mesh();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_triangles()) *
                static_cast<size_t>(test.local_size() * trial.local_size()));
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    if (regions && !regions->count(mesh.region()[static_cast<size_t>(t)]))
      continue;
    const double a = mesh.area(t);
    const int na = test.local_size();
    const int nb = trial.local_size();
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < nb; ++j) {
        double v;
        if (na == 3 && nb == 3)
          v = (i == j) ? a / 6.0 : a / 12.0;  // int of b_i b_j on affine tri
        else if (na == 3 || nb == 3)
          v = a / 3.0;  // int of b_i against a constant
        else
          v = a;
        trips.emplace_back(static_cast<int>(test.dof(t, i)),
                           static_cast<int>(trial.dof(t, j)), v);
      }
    }
  }
  SparseMatrix M(test.dof_count(), trial.dof_count());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

Eigen::VectorXd interpolate(const FunctionSpace& space, const ScalarField& f) {
  Eigen::VectorXd c(space.dof_count());
  const TriangleSurfaceMesh& mesh = space.mesh();
  if (space.family() == Family::P1Continuous) {
    for (long v = 0; v < mesh.num_vertices(); ++v) c[v] = f(mesh.vertex(v));
  } else {
    for (long t = 0; t < mesh.num_triangles(); ++t)
      for (int k = 0; k < space.local_size(); ++k)
        c[space.dof(t, k)] = f(space.node(t, k));
  }
  if (!c.allFinite())
    throw std::invalid_argument("interpolate: non-finite value at a node");
  return c;
}

double mean_value(const FunctionSpace& space, const Eigen::VectorXd& v) {
  if (v.size() != space.dof_count())
    throw std::invalid_argument("mean_value: coefficient length mismatch");
  // <v,1> accumulated per triangle with exact formulas; <1,1> = total area
  double num = 0.0;
  const TriangleSurfaceMesh& mesh = space.mesh();
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.area(t);
    if (space.local_size() == 1) {
      num += a * v[space.dof(t, 0)];
    } else {
      for (int k = 0; k < 3; ++k) num += a / 3.0 * v[space.dof(t, k)];
    }
  }
  return num / mesh.total_area();
}

}  // namespace bem
