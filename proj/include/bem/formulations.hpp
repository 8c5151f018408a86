#pragma once

#include <string>

#include "bem/operators.hpp"

namespace bem {

enum class BCKind { Dirichlet, Neumann, Mixed, Robin, StdDirichlet, StdRobin };
const char* bc_kind_name(BCKind k);
BCKind bc_kind_from_string(const std::string& s);

enum class ScalingLaw { HScaled, Constant, Explicit };
enum class RobinBetaVariant { NumericalSection, TheorySection };

// Penalty weights after applying the scaling law at a given mesh size.
struct ResolvedPenalty {
  double beta_D = 0.0;
  double beta_N = 0.0;
  double beta_R = 0.0;
  double omega = 1.0;  // 1 / (eps * beta_R + 1)
  double eps = 1.0;
};

struct PenaltyParameters {
  double beta = 0.1;
  double eps = 1.0;
  ScalingLaw law = ScalingLaw::Constant;
  RobinBetaVariant variant = RobinBetaVariant::NumericalSection;
  // used only with ScalingLaw::Explicit
  double explicit_beta_D = 0.0;
  double explicit_beta_N = 0.0;

  // h-scaled: beta_D = beta/h, beta_N = beta*h; constant: both beta.
  // numerical-section: beta_R = (eps*beta_N + beta_D)/(eps + 1);
  // theory-section:    beta_R = (eps/beta_N + beta_D)/(eps + 1).
  ResolvedPenalty resolve(double h) const;
};

// Dense system A + B with block layout [[W, K'],[-K, V]], unknowns (u, lambda)
// tested against (v, mu). Single-block comparison methods set one dimension
// to zero. The sparse penalty blocks are kept alongside the combined matrix.
struct BlockSystem {
  BCKind kind = BCKind::Dirichlet;
  const FunctionSpace* primal = nullptr;
  const FunctionSpace* flux = nullptr;
  long dim_primal = 0;
  long dim_flux = 0;
  Eigen::MatrixXd A;
  SparseMatrix B11, B12, B21, B22;
  Eigen::VectorXd rhs;
  ResolvedPenalty penalty;
  // nonempty for the pure-Neumann mean constraint: A11 += m m^T
  Eigen::VectorXd augment_m;

  long dim() const { return dim_primal + dim_flux; }
};

struct MultitraceBlocks {
  Eigen::MatrixXd A11;  // W
  Eigen::MatrixXd A12;  // K'
  Eigen::MatrixXd A21;  // -K
  Eigen::MatrixXd A22;  // V
};
MultitraceBlocks multitrace_blocks(const BoundaryOperators& ops);

// u = sin(pi x) sin(pi y) sinh(sqrt(2) pi z); g_N = grad u . p/|p|.
struct ManufacturedSolution {
  ScalarField u;
  ScalarField g_D;
  ScalarField g_N;
  double eps = 1.0;
};
ManufacturedSolution manufactured(BCKind kind, double eps = 1.0);

// Boundary data enters through its interpolant in the matching trace space:
// g_D into the primal space, g_N into the flux space, and the Robin combination
// g_D + eps*g_N into the primal space.
BlockSystem build_dirichlet(const BoundaryOperators& ops,
                            const PenaltyParameters& params,
                            const ScalarField& g_D);
BlockSystem build_neumann(const BoundaryOperators& ops,
                          const PenaltyParameters& params,
                          const ScalarField& g_N, bool mean_constraint = true);
BlockSystem build_mixed(const BoundaryOperators& ops,
                        const PenaltyParameters& params, const ScalarField& g_D,
                        const ScalarField& g_N);
BlockSystem build_robin(const BoundaryOperators& ops,
                        const PenaltyParameters& params, const ScalarField& g_D,
                        const ScalarField& g_N);
BlockSystem build_standard_dirichlet(const BoundaryOperators& ops,
                                     const ScalarField& g_D);
BlockSystem build_standard_robin(const BoundaryOperators& ops,
                                 const PenaltyParameters& params,
                                 const ScalarField& g_D, const ScalarField& g_N);

}  // namespace bem
