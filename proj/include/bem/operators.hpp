#pragma once

#include <string>
#include <vector>

#include "bem/quadrature.hpp"
#include "bem/spaces.hpp"

namespace bem {

enum class OperatorKind {
  SingleLayer,         // V, kernel G
  DoubleLayer,         // K, kernel dG/dn_y
  AdjointDoubleLayer,  // K', kernel dG/dn_x
  Hypersingular        // W, surface-curl form of G
};

const char* operator_kind_name(OperatorKind k);

// Stateless Laplace kernel evaluations. G(x,y) = G(y,x) > 0 for x != y.
struct GreensKernel {
  static double value(const Eigen::Vector3d& x, const Eigen::Vector3d& y);
  static double dn_y(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                     const Eigen::Vector3d& normal_y);
  static double dn_x(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                     const Eigen::Vector3d& normal_x);
};

struct OperatorMatrix {
  OperatorKind kind;
  const FunctionSpace* test = nullptr;
  const FunctionSpace* trial = nullptr;
  Eigen::MatrixXd m;
};

// The four Galerkin matrices from one shared pair sweep.
//   V : flux x flux          K : flux x primal
//   K': primal x flux        W : primal x primal
struct BoundaryOperators {
  const FunctionSpace* primal = nullptr;
  const FunctionSpace* flux = nullptr;
  Eigen::MatrixXd V, K, Kp, W;
};

// primal must be P1-continuous; flux any family on the same mesh.
// Thread count for the sweep comes from BEM_ASSEMBLY_THREADS (default 1);
// per-thread partial matrices are reduced in thread order, so results are
// deterministic for a fixed thread count.
BoundaryOperators assemble_operators(const FunctionSpace& primal,
                                     const FunctionSpace& flux,
                                     const PairQuadratureRules& rules = {});

OperatorMatrix assemble_single_layer(const FunctionSpace& test,
                                     const FunctionSpace& trial,
                                     const PairQuadratureRules& rules = {});
OperatorMatrix assemble_double_layer(const FunctionSpace& test,
                                     const FunctionSpace& trial,
                                     const PairQuadratureRules& rules = {});
OperatorMatrix assemble_adjoint_double_layer(const FunctionSpace& test,
                                             const FunctionSpace& trial,
                                             const PairQuadratureRules& rules = {});
OperatorMatrix assemble_hypersingular(const FunctionSpace& test,
                                      const FunctionSpace& trial,
                                      const PairQuadratureRules& rules = {});

struct InteriorEvaluation {
  std::vector<double> values;
  // set when a point came closer than h/2 to a quadrature node; the value is
  // still returned but the regular rule is unreliable there
  std::vector<bool> proximity_warning;
};

// Representation formula u~(p) = (V lambda)(p) - (K u)(p) at interior points.
InteriorEvaluation evaluate_interior(const FunctionSpace& primal,
                                     const FunctionSpace& flux,
                                     const Eigen::VectorXd& u_coeffs,
                                     const Eigen::VectorXd& lambda_coeffs,
                                     const std::vector<Eigen::Vector3d>& points,
                                     int order = 6);

// Binary format: "BOP1", int32 kind, int64 rows, int64 cols, row-major
// doubles. Spaces are not stored; the loader leaves them null.
void save_operator(const OperatorMatrix& op, const std::string& path);
OperatorMatrix load_operator(const std::string& path);

}  // namespace bem
