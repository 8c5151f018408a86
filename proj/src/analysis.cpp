#include "bem/analysis.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bem {

namespace {

void require_pair(const BoundaryOperators& ops) {
  if (!ops.primal || !ops.flux)
    throw std::invalid_argument("analysis: operators carry no spaces");
}

}  // namespace

double dual_norm(const BoundaryOperators& ops, const Eigen::VectorXd& mu_err) {
  require_pair(ops);
  if (mu_err.size() != ops.flux->dof_count())
    throw std::invalid_argument("dual_norm: coefficient size mismatch");
  return std::sqrt(std::max(mu_err.dot(ops.V * mu_err), 0.0));
}

double half_norm(const BoundaryOperators& ops, const Eigen::VectorXd& v_err) {
  require_pair(ops);
  if (v_err.size() != ops.primal->dof_count())
    throw std::invalid_argument("half_norm: coefficient size mismatch");
  const SparseMatrix M = assemble_mass(*ops.primal, *ops.primal);
  const Eigen::VectorXd ones =
      Eigen::VectorXd::Ones(ops.primal->dof_count());
  const double area = ones.dot(M * ones);
  const double mean = ones.dot(M * v_err) / area;
  return std::sqrt(std::max(v_err.dot(ops.W * v_err), 0.0) +
                   mean * mean * area);
}

ErrorBreakdown b_norm(const BoundaryOperators& ops, BCKind kind,
                      const ResolvedPenalty& pen, const Eigen::VectorXd& u_err,
                      const Eigen::VectorXd& lambda_err) {
  require_pair(ops);
  const FunctionSpace& P = *ops.primal;
  const FunctionSpace& F = *ops.flux;
  if (u_err.size() != P.dof_count() || lambda_err.size() != F.dof_count())
    throw std::invalid_argument("b_norm: coefficient size mismatch");

  ErrorBreakdown out;
  out.h = mesh_size(P.mesh());
  out.half_norm_primal = half_norm(ops, u_err);
  out.dual_norm_flux = dual_norm(ops, lambda_err);

  auto l2 = [](const SparseMatrix& M, const Eigen::VectorXd& e) {
    return std::sqrt(std::max(e.dot(M * e), 0.0));
  };
  switch (kind) {
    case BCKind::Dirichlet:
      out.l2_region_terms.push_back(
          {"primal", std::sqrt(pen.beta_D) * l2(assemble_mass(P, P), u_err)});
      break;
    case BCKind::Neumann:
      out.l2_region_terms.push_back(
          {"flux",
           std::sqrt(pen.beta_N) * l2(assemble_mass(F, F), lambda_err)});
      break;
    case BCKind::Mixed: {
      const SparseMatrix MD = assemble_mass(P, P, {{Region::Dirichlet}});
      const SparseMatrix MN = assemble_mass(F, F, {{Region::Neumann}});
      out.l2_region_terms.push_back(
          {"primal:dirichlet", std::sqrt(pen.beta_D) * l2(MD, u_err)});
      out.l2_region_terms.push_back(
          {"flux:neumann", std::sqrt(pen.beta_N) * l2(MN, lambda_err)});
      break;
    }
    case BCKind::Robin:
      out.l2_region_terms.push_back(
          {"primal", std::sqrt(pen.omega * pen.beta_R) *
                         l2(assemble_mass(P, P), u_err)});
      out.l2_region_terms.push_back(
          {"flux", std::sqrt(pen.eps * pen.omega) *
                       l2(assemble_mass(F, F), lambda_err)});
      break;
    default:
      throw std::invalid_argument("b_norm: no error norm for this kind");
  }
  out.b_norm_total = out.half_norm_primal + out.dual_norm_flux;
  for (const auto& t : out.l2_region_terms) out.b_norm_total += t.value;
  return out;
}

EocResult eoc(const std::vector<std::pair<double, double>>& records) {
  if (records.size() < 3)
    throw std::invalid_argument("eoc: need at least 3 records");
  for (size_t i = 0; i < records.size(); ++i) {
    if (!(records[i].second > 0.0))
      throw std::invalid_argument("eoc: errors must be positive");
    if (i > 0 && !(records[i].first < records[i - 1].first))
      throw std::invalid_argument("eoc: h must be strictly decreasing");
  }
  EocResult out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    const double x = std::log(records[i].first);
    const double y = std::log(records[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (i > 0)
      out.successive.push_back(
          std::log(records[i - 1].second / records[i].second) /
          std::log(records[i - 1].first / records[i].first));
  }
  const double n = static_cast<double>(records.size());
  out.least_squares = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

double calderon_residual(const BoundaryOperators& ops, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& lambda) {
  require_pair(ops);
  const FunctionSpace& P = *ops.primal;
  const FunctionSpace& F = *ops.flux;
  if (u.size() != P.dof_count() || lambda.size() != F.dof_count())
    throw std::invalid_argument("calderon_residual: size mismatch");
  const SparseMatrix Mpf = assemble_mass(P, F);
  const SparseMatrix Mfp = assemble_mass(F, P);
  const Eigen::VectorXd rv = ops.W * u + ops.Kp * lambda - 0.5 * (Mpf * lambda);
  const Eigen::VectorXd rm = -(ops.K * u) + ops.V * lambda - 0.5 * (Mfp * u);
  Eigen::SimplicialLLT<SparseMatrix> lp(assemble_mass(P, P));
  Eigen::SimplicialLLT<SparseMatrix> lf(assemble_mass(F, F));
  if (lp.info() != Eigen::Success || lf.info() != Eigen::Success)
    throw std::runtime_error("calderon_residual: singular mass matrix");
  return std::sqrt(rv.dot(lp.solve(rv)) + rm.dot(lf.solve(rm)));
}

std::vector<InteriorError> interior_error(
    const FunctionSpace& primal, const FunctionSpace& flux,
    const Eigen::VectorXd& u_coeffs, const Eigen::VectorXd& lambda_coeffs,
    const ScalarField& exact, const std::vector<Eigen::Vector3d>& points,
    int order) {
  const InteriorEvaluation ev = evaluate_interior(primal, flux, u_coeffs,
                                                  lambda_coeffs, points, order);
  std::vector<InteriorError> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    out[i].point = points[i];
    out[i].error = std::abs(ev.values[i] - exact(points[i]));
    out[i].proximity_warning = ev.proximity_warning[i];
  }
  return out;
}

const std::vector<Eigen::Vector3d>& standard_interior_points() {
  static const std::vector<Eigen::Vector3d> pts = {
      Eigen::Vector3d(0.3, 0.2, 0.1), Eigen::Vector3d(0.0, 0.0, 0.0),
      Eigen::Vector3d(-0.4, 0.1, 0.2)};
  return pts;
}

}  // namespace bem
