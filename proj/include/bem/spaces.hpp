#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <set>
#include <string>

#include "bem/mesh.hpp"

namespace bem {

enum class Family { P1Continuous, P0Discontinuous, P1Discontinuous };

Family family_from_string(const std::string& name);
const char* family_name(Family f);

// Discrete trace space on a mesh: DOF count plus the per-triangle
// local-to-global map. P1-continuous shares vertex DOFs; the discontinuous
// families own their DOFs per triangle.
class FunctionSpace {
 public:
  FunctionSpace(const TriangleSurfaceMesh& mesh, Family family);

  const TriangleSurfaceMesh& mesh() const { return *mesh_; }
  Family family() const { return family_; }
  long dof_count() const { return dof_count_; }
  int local_size() const { return nloc_; }
  long dof(long t, int k) const { return l2g_(t, k); }

  // interpolation node for local DOF k of triangle t
  Eigen::Vector3d node(long t, int k) const;

 private:
  const TriangleSurfaceMesh* mesh_;
  Family family_;
  long dof_count_;
  int nloc_;
  Eigen::Matrix<long, Eigen::Dynamic, 3> l2g_;
};

FunctionSpace build_space(const TriangleSurfaceMesh& mesh, Family family);

using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarField = std::function<double(const Eigen::Vector3d&)>;

// Galerkin mass/pairing matrix M[i,j] = integral over Gamma' of phi_i psi_j,
// Gamma' = union of triangles whose label is in `regions` (all when absent).
// Exact affine-triangle formulas, no quadrature error.
SparseMatrix assemble_mass(const FunctionSpace& test,
                           const FunctionSpace& trial,
                           std::optional<std::set<Region>> regions = {});

// Vertex interpolation for P1 families, centroid value for P0.
Eigen::VectorXd interpolate(const FunctionSpace& space, const ScalarField& f);

// <v,1>/<1,1> with exact mass integration.
double mean_value(const FunctionSpace& space, const Eigen::VectorXd& v);

}  // namespace bem
