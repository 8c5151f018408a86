#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bem/analysis.hpp"
#include "bem/solver.hpp"

namespace bem {

struct StudyOptions {
  BCKind bc = BCKind::Dirichlet;
  int k = 1;  // primal order; only 1 is implemented
  int l = 1;  // flux order: 0 or 1
  PenaltyParameters penalty{};
  int level_min = 1;
  int level_max = 3;
  GmresOptions gmres{};
};

// One CSV row. EOC summary rows reuse the shape with bc_kind "eoc-step" /
// "eoc-lsq" and slopes in the error columns; cells that do not apply hold
// NaN and serialize as empty fields.
struct StudyRecord {
  std::string bc_kind;
  int k = 1;
  int l = 1;
  int level = 0;
  double h = 0.0;
  long dofs = 0;
  double beta = 0.0;
  double beta_D = 0.0;
  double beta_N = 0.0;
  double beta_R = 0.0;
  double eps = 0.0;
  double dual_norm_flux = 0.0;
  double half_norm_primal = 0.0;
  double l2_primal = 0.0;
  double l2_flux = 0.0;
  double b_norm_total = 0.0;
  std::array<double, 3> interior_err{0.0, 0.0, 0.0};
  long gmres_iterations = 0;
  std::string preconditioner;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

const char* csv_header();
std::string csv_row(const StudyRecord& r);
void write_csv(std::ostream& out, const std::vector<StudyRecord>& records);

// Mesh + spaces + assembled operators for one refinement level, region-tagged
// to suit the boundary condition. Heap members keep addresses stable for the
// pointers inside BoundaryOperators.
struct Workspace {
  std::unique_ptr<TriangleSurfaceMesh> mesh;
  std::unique_ptr<FunctionSpace> primal;
  std::unique_ptr<FunctionSpace> flux;
  BoundaryOperators ops;
  int level = 0;
  double assembly_seconds = 0.0;
};

Workspace make_workspace(BCKind bc, int l, int level);

// Assemble the block system of `options.bc` over the manufactured solution.
BlockSystem build_study_system(const Workspace& ws, const StudyOptions& options);

// One level: solve + error analysis. The workspace must match options.bc/l.
StudyRecord run_level(const Workspace& ws, const StudyOptions& options);

// levels level_min..level_max, plus EOC summary rows when >= 3 levels ran.
std::vector<StudyRecord> run_convergence(const StudyOptions& options);

// Fixed level, beta grid (default log-spaced 1e-6..1e6, plus a beta = 0 row
// for the kinds where the penalty-free system is solvable). Each beta yields
// a preconditioned and an unpreconditioned record.
std::vector<StudyRecord> run_beta_sweep(const StudyOptions& options, int level,
                                        std::vector<double> betas = {});

// Robin only: full (eps, beta) grid at a fixed level.
std::vector<StudyRecord> run_eps_beta_sweep(const StudyOptions& options,
                                            int level,
                                            std::vector<double> eps_grid = {},
                                            std::vector<double> beta_grid = {});

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct VerifyReport {
  int level = 0;
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

// Operator sanity suite at one level (P0 flux space). dump_dir: save the four
// matrices as .op files. load_dir: read them back instead of assembling (the
// multi-level residual-decay check is skipped then).
VerifyReport run_verify(int level, const std::string& dump_dir = "",
                        const std::string& load_dir = "");

}  // namespace bem
