#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bem/formulations.hpp"
#include "bem/operators.hpp"

namespace bem {

// One beta-weighted L2 contribution, already square-rooted:
// value = weight^{1/2} * ||e||_{L2(region)}.
struct WeightedL2Term {
  std::string label;
  double value = 0.0;
};

struct InteriorError {
  Eigen::Vector3d point;
  double error = 0.0;
  bool proximity_warning = false;
};

struct ErrorBreakdown {
  double h = 0.0;
  double dual_norm_flux = 0.0;
  double half_norm_primal = 0.0;
  std::vector<WeightedL2Term> l2_region_terms;
  double b_norm_total = 0.0;  // half + dual + sum of l2 terms
  std::vector<InteriorError> interior_errors;
};

// sqrt(<V mu, mu>), the discrete dual-space norm surrogate.
double dual_norm(const BoundaryOperators& ops, const Eigen::VectorXd& mu_err);

// sqrt(<W v, v> + vbar^2 <1,1>); the mean term restores definiteness on
// constants.
double half_norm(const BoundaryOperators& ops, const Eigen::VectorXd& v_err);

// Weighted trace-pair error norm for one boundary-condition kind. Errors are
// coefficient vectors in the primal/flux spaces of `ops`. The std-* kinds
// have no such norm and are rejected.
ErrorBreakdown b_norm(const BoundaryOperators& ops, BCKind kind,
                      const ResolvedPenalty& pen, const Eigen::VectorXd& u_err,
                      const Eigen::VectorXd& lambda_err);

struct EocResult {
  std::vector<double> successive;  // one slope per consecutive level pair
  double least_squares = 0.0;
};

// Slopes of log(error) against log(h). Needs >= 3 records with h strictly
// decreasing and positive errors.
EocResult eoc(const std::vector<std::pair<double, double>>& records);

// Block residual of the trace pair under the multitrace identity
//   A (u, lambda)^T = 1/2 [[0, M_pf], [M_fp, 0]] (u, lambda)^T,
// measured in the mass-weighted dual norm. Decays when (u, lambda)
// interpolates a harmonic function's trace pair.
double calderon_residual(const BoundaryOperators& ops, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& lambda);

// |u(p) - u_h(p)| per point via the representation formula.
std::vector<InteriorError> interior_error(
    const FunctionSpace& primal, const FunctionSpace& flux,
    const Eigen::VectorXd& u_coeffs, const Eigen::VectorXd& lambda_coeffs,
    const ScalarField& exact, const std::vector<Eigen::Vector3d>& points,
    int order = 6);

// Fixed probe set used by the study harness: one generic point, the center,
// one point in the mirrored half.
const std::vector<Eigen::Vector3d>& standard_interior_points();

}  // namespace bem
