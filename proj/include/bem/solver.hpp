#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "bem/formulations.hpp"

namespace bem {

struct SolveReport {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;       // preconditioned, as iterated
  double true_relative_residual = 0.0;  // ||b - A x|| / ||b||
  std::string preconditioner = "none";  // "none" or "block-mass"
  double seconds = 0.0;
  bool converged = false;
};

struct GmresOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  int restart = 0;  // 0: full GMRES
  bool precond = true;
};

// carries the best iterate reached before breakdown or iteration exhaustion
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SolveReport best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveReport& best() const { return best_; }

 private:
  SolveReport best_;
};

// Exact blockwise inverse of diag(M_primal, M_flux) via sparse Cholesky.
class BlockMassPreconditioner {
 public:
  BlockMassPreconditioner(const FunctionSpace* primal,
                          const FunctionSpace* flux);
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  long dim() const { return n1_ + n2_; }

 private:
  long n1_ = 0, n2_ = 0;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt1_, llt2_;
};

BlockMassPreconditioner block_mass_preconditioner(const BlockSystem& system);

SolveReport gmres(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs,
                  const BlockMassPreconditioner* M, const GmresOptions& opts);
SolveReport gmres(const BlockSystem& system, const GmresOptions& opts = {});

Eigen::VectorXd direct_solve(const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& rhs);
Eigen::VectorXd direct_solve(const BlockSystem& system);

}  // namespace bem
