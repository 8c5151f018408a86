#include "bem/formulations.hpp"

#include <cmath>
#include <stdexcept>

namespace bem {

const char* bc_kind_name(BCKind k) {
  switch (k) {
    case BCKind::Dirichlet: return "dirichlet";
    case BCKind::Neumann: return "neumann";
    case BCKind::Mixed: return "mixed";
    case BCKind::Robin: return "robin";
    case BCKind::StdDirichlet: return "std-dirichlet";
    case BCKind::StdRobin: return "std-robin";
  }
  return "?";
}

BCKind bc_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return BCKind::Dirichlet;
  if (s == "neumann") return BCKind::Neumann;
  if (s == "mixed") return BCKind::Mixed;
  if (s == "robin") return BCKind::Robin;
  if (s == "std-dirichlet") return BCKind::StdDirichlet;
  if (s == "std-robin") return BCKind::StdRobin;
  throw std::invalid_argument("unknown boundary condition kind: " + s);
}

ResolvedPenalty PenaltyParameters::resolve(double h) const {
  if (h <= 0.0) throw std::invalid_argument("resolve: h must be positive");
  if (beta < 0.0) throw std::invalid_argument("resolve: beta must be >= 0");
  ResolvedPenalty r;
  r.eps = eps;
  switch (law) {
    case ScalingLaw::HScaled:
      r.beta_D = beta / h;
      r.beta_N = beta * h;
      break;
    case ScalingLaw::Constant:
      r.beta_D = beta;
      r.beta_N = beta;
      break;
    case ScalingLaw::Explicit:
      r.beta_D = explicit_beta_D;
      r.beta_N = explicit_beta_N;
      break;
  }
  if (r.beta_D < 0.0 || r.beta_N < 0.0)
    throw std::invalid_argument("resolve: penalty weights must be >= 0");
  if (variant == RobinBetaVariant::NumericalSection) {
    r.beta_R = (eps * r.beta_N + r.beta_D) / (eps + 1.0);
  } else {
    if (r.beta_N <= 0.0)
      throw std::invalid_argument(
          "resolve: theory-section beta_R needs beta_N > 0");
    r.beta_R = (eps / r.beta_N + r.beta_D) / (eps + 1.0);
  }
  r.omega = 1.0 / (eps * r.beta_R + 1.0);
  return r;
}

MultitraceBlocks multitrace_blocks(const BoundaryOperators& ops) {
  return {ops.W, ops.Kp, -ops.K, ops.V};
}

ManufacturedSolution manufactured(BCKind kind, double eps) {
  const double pi = M_PI;
  const double s2 = std::sqrt(2.0);
  ManufacturedSolution m;
  m.eps = eps;
  (void)kind;  // same fields for every kind; eps only matters for Robin
  m.u = [pi, s2](const Eigen::Vector3d& p) {
    return std::sin(pi * p[0]) * std::sin(pi * p[1]) * std::sinh(s2 * pi * p[2]);
  };
  m.g_D = m.u;
  m.g_N = [pi, s2](const Eigen::Vector3d& p) {
    const Eigen::Vector3d grad(
        pi * std::cos(pi * p[0]) * std::sin(pi * p[1]) * std::sinh(s2 * pi * p[2]),
        pi * std::sin(pi * p[0]) * std::cos(pi * p[1]) * std::sinh(s2 * pi * p[2]),
        s2 * pi * std::sin(pi * p[0]) * std::sin(pi * p[1]) *
            std::cosh(s2 * pi * p[2]));
    return grad.dot(p.normalized());
  };
  return m;
}

namespace {

void require_uniform_region(const TriangleSurfaceMesh& mesh, Region r,
                            const char* what) {
  for (long t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.region(t) != r)
      throw std::invalid_argument(std::string(what) +
                                  ": mesh has triangles outside the " +
                                  region_name(r) + " region");
}

BlockSystem base_system(const BoundaryOperators& ops, BCKind kind) {
  BlockSystem s;
  s.kind = kind;
  s.primal = ops.primal;
  s.flux = ops.flux;
  s.dim_primal = ops.primal->dof_count();
  s.dim_flux = ops.flux->dof_count();
  const long n1 = s.dim_primal, n2 = s.dim_flux;
  s.A.resize(n1 + n2, n1 + n2);
  s.A.topLeftCorner(n1, n1) = ops.W;
  s.A.topRightCorner(n1, n2) = ops.Kp;
  s.A.bottomLeftCorner(n2, n1) = -ops.K;
  s.A.bottomRightCorner(n2, n2) = ops.V;
  s.B11.resize(n1, n1);
  s.B12.resize(n1, n2);
  s.B21.resize(n2, n1);
  s.B22.resize(n2, n2);
  s.rhs = Eigen::VectorXd::Zero(n1 + n2);
  return s;
}

// add the sparse penalty blocks into the dense combined matrix
void fold_penalty(BlockSystem& s) {
  const long n1 = s.dim_primal;
  auto add = [&](const SparseMatrix& B, long r0, long c0) {
    for (int k = 0; k < B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(B, k); it; ++it)
        s.A(r0 + it.row(), c0 + it.col()) += it.value();
  };
  add(s.B11, 0, 0);
  add(s.B12, 0, n1);
  add(s.B21, n1, 0);
  add(s.B22, n1, n1);
}

double sparse_quad(const SparseMatrix& M, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  return a.dot(M * b);
}

}  // namespace

BlockSystem build_dirichlet(const BoundaryOperators& ops,
                            const PenaltyParameters& params,
                            const ScalarField& g_D) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  require_uniform_region(mesh, Region::Dirichlet, "build_dirichlet");
  const ResolvedPenalty pen = params.resolve(mesh_size(mesh));
  BlockSystem s = base_system(ops, BCKind::Dirichlet);
  s.penalty = pen;
  const SparseMatrix Mpp = assemble_mass(*ops.primal, *ops.primal);
  const SparseMatrix Mpf = assemble_mass(*ops.primal, *ops.flux);
  const SparseMatrix Mfp = assemble_mass(*ops.flux, *ops.primal);
  s.B11 = pen.beta_D * Mpp;
  s.B12 = -0.5 * Mpf;
  s.B21 = 0.5 * Mfp;
  fold_penalty(s);
  const Eigen::VectorXd gD = interpolate(*ops.primal, g_D);
  s.rhs.head(s.dim_primal) = pen.beta_D * (Mpp * gD);
  s.rhs.tail(s.dim_flux) = Mfp * gD;
  return s;
}

BlockSystem build_neumann(const BoundaryOperators& ops,
                          const PenaltyParameters& params,
                          const ScalarField& g_N, bool mean_constraint) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  require_uniform_region(mesh, Region::Neumann, "build_neumann");
  const ResolvedPenalty pen = params.resolve(mesh_size(mesh));
  BlockSystem s = base_system(ops, BCKind::Neumann);
  s.penalty = pen;
  const SparseMatrix Mpp = assemble_mass(*ops.primal, *ops.primal);
  const SparseMatrix Mpf = assemble_mass(*ops.primal, *ops.flux);
  const SparseMatrix Mfp = assemble_mass(*ops.flux, *ops.primal);
  const SparseMatrix Mff = assemble_mass(*ops.flux, *ops.flux);
  const Eigen::VectorXd gN = interpolate(*ops.flux, g_N);
  // compatibility: the discrete integral of g_N must be (nearly) zero
  const Eigen::VectorXd onesf = Eigen::VectorXd::Ones(s.dim_flux);
  const double integral = sparse_quad(Mff, onesf, gN);
  const double area = sparse_quad(Mff, onesf, onesf);
  const double norm = std::sqrt(std::max(sparse_quad(Mff, gN, gN), 0.0));
  if (norm > 0.0 && std::abs(integral) > 0.01 * std::sqrt(area) * norm)
    throw std::invalid_argument(
        "build_neumann: incompatible data, integral of g_N is not zero");
  s.B12 = 0.5 * Mpf;
  s.B21 = -0.5 * Mfp;
  s.B22 = pen.beta_N * Mff;
  fold_penalty(s);
  if (mean_constraint) {
    s.augment_m = Mpp * Eigen::VectorXd::Ones(s.dim_primal);
    s.A.topLeftCorner(s.dim_primal, s.dim_primal) +=
        s.augment_m * s.augment_m.transpose();
  }
  s.rhs.head(s.dim_primal) = Mpf * gN;
  s.rhs.tail(s.dim_flux) = pen.beta_N * (Mff * gN);
  return s;
}

BlockSystem build_mixed(const BoundaryOperators& ops,
                        const PenaltyParameters& params, const ScalarField& g_D,
                        const ScalarField& g_N) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  long nd = 0, nn = 0;
  for (long t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.region(t) == Region::Dirichlet) ++nd;
    else if (mesh.region(t) == Region::Neumann) ++nn;
    else
      throw std::invalid_argument("build_mixed: Robin-labeled triangle present");
  }
  if (nd == 0 || nn == 0)
    throw std::invalid_argument("build_mixed: both regions must be nonempty");
  const ResolvedPenalty pen = params.resolve(mesh_size(mesh));
  BlockSystem s = base_system(ops, BCKind::Mixed);
  s.penalty = pen;
  const std::set<Region> D{Region::Dirichlet}, N{Region::Neumann};
  const SparseMatrix MppD = assemble_mass(*ops.primal, *ops.primal, D);
  const SparseMatrix MpfD = assemble_mass(*ops.primal, *ops.flux, D);
  const SparseMatrix MfpD = assemble_mass(*ops.flux, *ops.primal, D);
  const SparseMatrix MpfN = assemble_mass(*ops.primal, *ops.flux, N);
  const SparseMatrix MfpN = assemble_mass(*ops.flux, *ops.primal, N);
  const SparseMatrix MffN = assemble_mass(*ops.flux, *ops.flux, N);
  s.B11 = pen.beta_D * MppD;
  s.B12 = -0.5 * MpfD + 0.5 * MpfN;
  s.B21 = 0.5 * MfpD - 0.5 * MfpN;
  s.B22 = pen.beta_N * MffN;
  fold_penalty(s);
  const Eigen::VectorXd gD = interpolate(*ops.primal, g_D);
  const Eigen::VectorXd gN = interpolate(*ops.flux, g_N);
  s.rhs.head(s.dim_primal) = pen.beta_D * (MppD * gD) + MpfN * gN;
  s.rhs.tail(s.dim_flux) = MfpD * gD + pen.beta_N * (MffN * gN);
  return s;
}

BlockSystem build_robin(const BoundaryOperators& ops,
                        const PenaltyParameters& params, const ScalarField& g_D,
                        const ScalarField& g_N) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  require_uniform_region(mesh, Region::Robin, "build_robin");
  if (params.eps <= 0.0)
    throw std::invalid_argument("build_robin: eps must be positive");
  const ResolvedPenalty pen = params.resolve(mesh_size(mesh));
  BlockSystem s = base_system(ops, BCKind::Robin);
  s.penalty = pen;
  const SparseMatrix Mpp = assemble_mass(*ops.primal, *ops.primal);
  const SparseMatrix Mpf = assemble_mass(*ops.primal, *ops.flux);
  const SparseMatrix Mfp = assemble_mass(*ops.flux, *ops.primal);
  const SparseMatrix Mff = assemble_mass(*ops.flux, *ops.flux);
  const double om = pen.omega;
  s.B11 = om * pen.beta_R * Mpp;
  s.B12 = -(om - 0.5) * Mpf;
  s.B21 = (om - 0.5) * Mfp;
  s.B22 = om * pen.eps * Mff;
  fold_penalty(s);
  const double eps = pen.eps;
  const Eigen::VectorXd h0 = interpolate(
      *ops.primal,
      [&](const Eigen::Vector3d& p) { return g_D(p) + eps * g_N(p); });
  s.rhs.head(s.dim_primal) = om * pen.beta_R * (Mpp * h0);
  s.rhs.tail(s.dim_flux) = om * (Mfp * h0);
  return s;
}

BlockSystem build_standard_dirichlet(const BoundaryOperators& ops,
                                     const ScalarField& g_D) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  require_uniform_region(mesh, Region::Dirichlet, "build_standard_dirichlet");
  BlockSystem s;
  s.kind = BCKind::StdDirichlet;
  s.primal = nullptr;
  s.flux = ops.flux;
  s.dim_primal = 0;
  s.dim_flux = ops.flux->dof_count();
  s.A = ops.V;
  const SparseMatrix Mfp = assemble_mass(*ops.flux, *ops.primal);
  const Eigen::VectorXd gD = interpolate(*ops.primal, g_D);
  s.rhs = 0.5 * (Mfp * gD) + ops.K * gD;
  return s;
}

BlockSystem build_standard_robin(const BoundaryOperators& ops,
                                 const PenaltyParameters& params,
                                 const ScalarField& g_D,
                                 const ScalarField& g_N) {
  const TriangleSurfaceMesh& mesh = ops.primal->mesh();
  require_uniform_region(mesh, Region::Robin, "build_standard_robin");
  if (params.eps <= 0.0)
    throw std::invalid_argument("build_standard_robin: eps must be positive");
  if (ops.flux->family() != Family::P1Continuous)
    throw std::invalid_argument(
        "build_standard_robin: needs the equal-order flux space (l = 1)");
  BlockSystem s;
  s.kind = BCKind::StdRobin;
  s.primal = ops.primal;
  s.flux = nullptr;
  s.dim_primal = ops.primal->dof_count();
  s.dim_flux = 0;
  const double eps = params.eps;
  const SparseMatrix Mpp = assemble_mass(*ops.primal, *ops.primal);
  Eigen::MatrixXd half_minus_kp = -ops.Kp;
  for (int k = 0; k < Mpp.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(Mpp, k); it; ++it)
      half_minus_kp(it.row(), it.col()) += 0.5 * it.value();
  s.A = ops.W + half_minus_kp / eps;
  const Eigen::VectorXd data = interpolate(
      *ops.primal,
      [&](const Eigen::Vector3d& p) { return g_D(p) / eps + g_N(p); });
  s.rhs = half_minus_kp * data;
  s.penalty.eps = eps;
  return s;
}

}  // namespace bem
