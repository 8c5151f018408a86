#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "bem/mesh.hpp"

namespace bem {

// Symmetric rule on the reference triangle in barycentric coordinates;
// weights sum to the reference area 1/2.
struct TriangleRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;  // barycentric
  Eigen::VectorXd weights;
  int degree = 0;  // polynomial exactness
};

// 1 <= order <= 20
TriangleRule triangle_rule(int order);

enum class PairClass { Disjoint, Vertex, Edge, Coincident };

const char* pair_class_name(PairClass c);

// 4D rule on the product of two reference triangles after the
// singularity-removing coordinate transform for the adjacency class.
// Barycentric coordinates assume the triangles are presented with shared
// vertices first: coincident uses the same vertex order on both, edge shares
// the directed edge (vertex 0, vertex 1), vertex shares vertex 0.
// Constants integrate to exactly 1/4.
struct PairRule {
  PairClass cls = PairClass::Coincident;
  Eigen::Matrix<double, Eigen::Dynamic, 3> bary_a;
  Eigen::Matrix<double, Eigen::Dynamic, 3> bary_b;
  Eigen::VectorXd weights;
  int order = 0;  // Gauss points per dimension; node count = order^4 x regions
};

// class must not be Disjoint; order in [1, 20]
PairRule singular_pair_rule(PairClass cls, int order);

// Adjacency classification by shared global vertex count (0/1/2/3), plus the
// vertex orders that present shared vertices first as required by PairRule.
// For Edge both triangles list the shared directed edge of `ta` first, in the
// same direction.
struct PairOrder {
  PairClass cls = PairClass::Disjoint;
  std::array<int, 3> order_a{0, 1, 2};  // global vertex ids
  std::array<int, 3> order_b{0, 1, 2};
};
PairOrder classify_pair(const TriangleSurfaceMesh& mesh, long ta, long tb);

struct PairQuadratureRules {
  int regular_order = 4;
  int near_order = 6;      // centroid distance < 2*max(diam) upgrade
  int singular_order = 4;  // Gauss points per dimension in transforms
};

using PairKernel =
    std::function<double(const Eigen::Vector3d& x, const Eigen::Vector3d& y)>;

// Galerkin pair integral of `kernel` over tri_a x tri_b (P0 basis on both;
// the assembly routines inline the basis-weighted variants). Dispatches the
// regular product rule or the singular transform by adjacency class.
// A non-finite kernel value at a quadrature node signals a misclassified
// pair and raises.
double integrate_pair(const PairKernel& kernel, const TriangleSurfaceMesh& mesh,
                      long tri_a, long tri_b,
                      const PairQuadratureRules& rules = {});

}  // namespace bem
