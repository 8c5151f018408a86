#pragma once

#include <Eigen/Dense>

#include <array>

// Reference values for the singular Galerkin pair integrals, computed
// independently of the library quadrature: closed-form inner integrals
// (edge-sum potential / solid angle) and an extrapolated outer integral.
namespace oracle {

using Tri = std::array<Eigen::Vector3d, 3>;

// integral over t of 1/|p - y| dy (no 1/4pi factor)
double potential_tri(const Eigen::Vector3d& p, const Tri& t);

// signed solid angle of t seen from p, orientation (t1-t0) x (t2-t0)
double solid_angle(const Eigen::Vector3d& p, const Tri& t);

// (1/4pi) int_a int_b 1/|x-y| dy dx
double galerkin_V(const Tri& a, const Tri& b);

// (1/4pi) int_a int_b (x-y).n_b/|x-y|^3 dy dx, n_b the unit normal of b
double galerkin_K(const Tri& a, const Tri& b);

}  // namespace oracle
