#include "bem/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <vector>

namespace bem {

BlockMassPreconditioner::BlockMassPreconditioner(const FunctionSpace* primal,
                                                 const FunctionSpace* flux) {
  auto factor = [](const FunctionSpace& s) {
    auto llt = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
    llt->compute(assemble_mass(s, s));
    if (llt->info() != Eigen::Success)
      throw std::runtime_error("block_mass_preconditioner: singular mass matrix");
    return llt;
  };
  if (primal) {
    n1_ = primal->dof_count();
    llt1_ = factor(*primal);
  }
  if (flux) {
    n2_ = flux->dof_count();
    llt2_ = factor(*flux);
  }
  if (n1_ + n2_ == 0)
    throw std::invalid_argument("block_mass_preconditioner: no spaces");
}

Eigen::VectorXd BlockMassPreconditioner::apply(const Eigen::VectorXd& v) const {
  if (v.size() != n1_ + n2_)
    throw std::invalid_argument("preconditioner: dimension mismatch");
  Eigen::VectorXd out(v.size());
  if (llt1_) out.head(n1_) = llt1_->solve(v.head(n1_));
  if (llt2_) out.tail(n2_) = llt2_->solve(v.tail(n2_));
  return out;
}

BlockMassPreconditioner block_mass_preconditioner(const BlockSystem& system) {
  return BlockMassPreconditioner(system.dim_primal > 0 ? system.primal : nullptr,
                                 system.dim_flux > 0 ? system.flux : nullptr);
}

SolveReport gmres(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                  const BlockMassPreconditioner* M, const GmresOptions& opts) {
  if (A.rows() != A.cols() || A.rows() != rhs.size())
    throw std::invalid_argument("gmres: system must be square");
  if (!(opts.tol > 0.0 && opts.tol < 1.0))
    throw std::invalid_argument("gmres: tol must be in (0, 1)");
  if (opts.max_iter < 1) throw std::invalid_argument("gmres: max_iter < 1");
  const auto t0 = std::chrono::steady_clock::now();
  const long n = rhs.size();
  SolveReport rep;
  rep.preconditioner = M ? "block-mass" : "none";
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  auto finish = [&](double res_rel, bool ok) {
    rep.x = x;
    rep.relative_residual = res_rel;
    const double bn = rhs.norm();
    rep.true_relative_residual =
        bn > 0.0 ? (rhs - A * x).norm() / bn : (A * x).norm();
    rep.converged = ok;
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  Eigen::VectorXd r = rhs;
  const Eigen::VectorXd Mb = M ? M->apply(rhs) : rhs;
  const double beta0 = Mb.norm();
  if (beta0 == 0.0) {
    finish(0.0, true);
    return rep;
  }
  double res = beta0;
  bool converged = false, breakdown = false;
  while (rep.iterations < opts.max_iter && !converged && !breakdown) {
    const Eigen::VectorXd Mr = M ? M->apply(r) : r;
    const double beta = Mr.norm();
    if (beta <= opts.tol * beta0) {
      res = beta;
      converged = true;
      break;
    }
    int m = opts.max_iter - rep.iterations;
    if (opts.restart > 0 && opts.restart < m) m = opts.restart;
    std::vector<Eigen::VectorXd> Q;
    Q.reserve(static_cast<size_t>(m) + 1);
    Q.push_back(Mr / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g = Eigen::VectorXd::Zero(m + 1);
    g[0] = beta;
    int used = 0;
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXd w = A * Q[static_cast<size_t>(k)];
      if (M) w = M->apply(w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = Q[static_cast<size_t>(i)].dot(w);
        w -= H(i, k) * Q[static_cast<size_t>(i)];
      }
      H(k + 1, k) = w.norm();
      bool extended = false;
      if (H(k + 1, k) > 1e-14 * beta) {
        Q.push_back(w / H(k + 1, k));
        extended = true;
      }
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double d = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = H(k, k) / d;
      sn[k] = H(k + 1, k) / d;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res = std::abs(g[k + 1]);
      used = k + 1;
      if (res <= opts.tol * beta0) {
        converged = true;
        break;
      }
      if (!extended) {  // Krylov space exhausted
        breakdown = true;
        break;
      }
    }
    if (used > 0) {
      const Eigen::VectorXd y = H.topLeftCorner(used, used)
                                    .triangularView<Eigen::Upper>()
                                    .solve(g.head(used));
      for (int i = 0; i < used; ++i) x += y[i] * Q[static_cast<size_t>(i)];
    }
    rep.iterations += used;
    if (!converged && !breakdown) r = rhs - A * x;
  }
  finish(res / beta0, converged);
  if (!converged) {
    SolveReport best = rep;
    throw NonConvergenceError(
        breakdown ? "gmres: breakdown before reaching tolerance"
                  : "gmres: iteration limit reached before tolerance",
        std::move(best));
  }
  return rep;
}

SolveReport gmres(const BlockSystem& system, const GmresOptions& opts) {
  if (opts.precond) {
    const BlockMassPreconditioner M = block_mass_preconditioner(system);
    return gmres(system.A, system.rhs, &M, opts);
  }
  return gmres(system.A, system.rhs, nullptr, opts);
}

Eigen::VectorXd direct_solve(const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& rhs) {
  if (A.rows() != A.cols() || A.rows() != rhs.size())
    throw std::invalid_argument("direct_solve: system must be square");
  if (A.rows() > 10000)
    throw std::invalid_argument("direct_solve: dimension above guard");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rcond() < 1e-10)
    throw std::runtime_error("direct_solve: singular matrix");
  return lu.solve(rhs);
}

Eigen::VectorXd direct_solve(const BlockSystem& system) {
  return direct_solve(system.A, system.rhs);
}

}  // namespace bem
