#include "bem/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* csv_header() {
  return "bc_kind,k,l,level,h,dofs,beta,beta_D,beta_N,beta_R,eps,"
         "dual_norm_flux,half_norm_primal,l2_primal,l2_flux,b_norm_total,"
         "interior_err_1,interior_err_2,interior_err_3,"
         "gmres_iterations,preconditioner,assembly_seconds,solve_seconds";
}

std::string csv_row(const StudyRecord& r) {
  std::ostringstream os;
  os << r.bc_kind << ',' << r.k << ',' << r.l << ',' << r.level << ','
     << fmt(r.h) << ',' << r.dofs << ',' << fmt(r.beta) << ','
     << fmt(r.beta_D) << ',' << fmt(r.beta_N) << ',' << fmt(r.beta_R) << ','
     << fmt(r.eps) << ',' << fmt(r.dual_norm_flux) << ','
     << fmt(r.half_norm_primal) << ',' << fmt(r.l2_primal) << ','
     << fmt(r.l2_flux) << ',' << fmt(r.b_norm_total) << ','
     << fmt(r.interior_err[0]) << ',' << fmt(r.interior_err[1]) << ','
     << fmt(r.interior_err[2]) << ',' << r.gmres_iterations << ','
     << r.preconditioner << ',' << fmt(r.assembly_seconds) << ','
     << fmt(r.solve_seconds);
  return os.str();
}

void write_csv(std::ostream& out, const std::vector<StudyRecord>& records) {
  out << csv_header() << "\n";
  for (const auto& r : records) out << csv_row(r) << "\n";
}

Workspace make_workspace(BCKind bc, int l, int level) {
  if (l != 0 && l != 1)
    throw std::invalid_argument("study: flux order l must be 0 or 1");
  Workspace ws;
  TriangleSurfaceMesh base = make_icosphere(level);
  if (bc == BCKind::Mixed) {
    ws.mesh = std::make_unique<TriangleSurfaceMesh>(
        tag_regions(std::move(base), HalfspaceX{}));
  } else {
    Region lab = Region::Dirichlet;
    if (bc == BCKind::Neumann) lab = Region::Neumann;
    if (bc == BCKind::Robin || bc == BCKind::StdRobin) lab = Region::Robin;
    ws.mesh = std::make_unique<TriangleSurfaceMesh>(
        tag_regions(std::move(base), WholeBoundary{lab}));
  }
  ws.primal = std::make_unique<FunctionSpace>(*ws.mesh, Family::P1Continuous);
  ws.flux = std::make_unique<FunctionSpace>(
      *ws.mesh, l == 0 ? Family::P0Discontinuous : Family::P1Continuous);
  ws.level = level;
  const auto t0 = std::chrono::steady_clock::now();
  ws.ops = assemble_operators(*ws.primal, *ws.flux);
  ws.assembly_seconds = seconds_since(t0);
  return ws;
}

BlockSystem build_study_system(const Workspace& ws,
                               const StudyOptions& options) {
  if (options.k != 1)
    throw std::invalid_argument("study: only k = 1 is implemented");
  const ManufacturedSolution ms = manufactured(options.bc, options.penalty.eps);
  switch (options.bc) {
    case BCKind::Dirichlet:
      return build_dirichlet(ws.ops, options.penalty, ms.g_D);
    case BCKind::Neumann:
      return build_neumann(ws.ops, options.penalty, ms.g_N);
    case BCKind::Mixed:
      return build_mixed(ws.ops, options.penalty, ms.g_D, ms.g_N);
    case BCKind::Robin:
      return build_robin(ws.ops, options.penalty, ms.g_D, ms.g_N);
    case BCKind::StdDirichlet:
      return build_standard_dirichlet(ws.ops, ms.g_D);
    case BCKind::StdRobin:
      return build_standard_robin(ws.ops, options.penalty, ms.g_D, ms.g_N);
  }
  throw std::logic_error("study: unknown kind");
}

StudyRecord run_level(const Workspace& ws, const StudyOptions& options) {
  const ManufacturedSolution ms = manufactured(options.bc, options.penalty.eps);
  BlockSystem sys = build_study_system(ws, options);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = gmres(sys, options.gmres);
  const double solve_s = seconds_since(t0);

  StudyRecord r;
  r.bc_kind = bc_kind_name(options.bc);
  r.k = options.k;
  r.l = options.l;
  r.level = ws.level;
  r.h = mesh_size(*ws.mesh);
  r.dofs = sys.dim();
  r.beta = r.beta_D = r.beta_N = r.beta_R = r.eps = kNaN;
  switch (options.bc) {
    case BCKind::Dirichlet:
      r.beta = options.penalty.beta;
      r.beta_D = sys.penalty.beta_D;
      break;
    case BCKind::Neumann:
      r.beta = options.penalty.beta;
      r.beta_N = sys.penalty.beta_N;
      break;
    case BCKind::Mixed:
      r.beta = options.penalty.beta;
      r.beta_D = sys.penalty.beta_D;
      r.beta_N = sys.penalty.beta_N;
      break;
    case BCKind::Robin:
      r.beta = options.penalty.beta;
      r.beta_D = sys.penalty.beta_D;
      r.beta_N = sys.penalty.beta_N;
      r.beta_R = sys.penalty.beta_R;
      r.eps = options.penalty.eps;
      break;
    case BCKind::StdDirichlet:
      break;
    case BCKind::StdRobin:
      r.eps = options.penalty.eps;
      break;
  }

  const long np = ws.primal->dof_count();
  const long nf = ws.flux->dof_count();
  Eigen::VectorXd ucoef, lcoef;
  r.dual_norm_flux = r.half_norm_primal = r.l2_primal = r.l2_flux = kNaN;
  switch (options.bc) {
    case BCKind::Dirichlet:
    case BCKind::Neumann:
    case BCKind::Mixed:
    case BCKind::Robin: {
      ucoef = rep.x.head(np);
      lcoef = rep.x.tail(nf);
      const Eigen::VectorXd eu = interpolate(*ws.primal, ms.u) - ucoef;
      const Eigen::VectorXd el = interpolate(*ws.flux, ms.g_N) - lcoef;
      const ErrorBreakdown bd =
          b_norm(ws.ops, options.bc, sys.penalty, eu, el);
      r.dual_norm_flux = bd.dual_norm_flux;
      r.half_norm_primal = bd.half_norm_primal;
      r.l2_primal = r.l2_flux = 0.0;
      for (const auto& t : bd.l2_region_terms) {
        if (t.label.rfind("primal", 0) == 0)
          r.l2_primal += t.value;
        else
          r.l2_flux += t.value;
      }
      r.b_norm_total = bd.b_norm_total;
      break;
    }
    case BCKind::StdDirichlet: {
      // known Dirichlet trace, solved flux
      ucoef = interpolate(*ws.primal, ms.g_D);
      lcoef = rep.x;
      const Eigen::VectorXd el = interpolate(*ws.flux, ms.g_N) - lcoef;
      r.dual_norm_flux = dual_norm(ws.ops, el);
      r.b_norm_total = r.dual_norm_flux;
      break;
    }
    case BCKind::StdRobin: {
      // solved trace; flux recovered nodally from the boundary condition
      ucoef = rep.x;
      lcoef = (interpolate(*ws.primal, ms.g_D) - ucoef) / options.penalty.eps +
              interpolate(*ws.primal, ms.g_N);
      const Eigen::VectorXd eu = interpolate(*ws.primal, ms.u) - ucoef;
      r.half_norm_primal = half_norm(ws.ops, eu);
      r.b_norm_total = r.half_norm_primal;
      break;
    }
  }

  const auto ie = interior_error(*ws.primal, *ws.flux, ucoef, lcoef, ms.u,
                                 standard_interior_points());
  for (size_t i = 0; i < ie.size() && i < 3; ++i)
    r.interior_err[i] = ie[i].error;
  r.gmres_iterations = rep.iterations;
  r.preconditioner = rep.preconditioner;
  r.assembly_seconds = ws.assembly_seconds;
  r.solve_seconds = solve_s;
  return r;
}

namespace {

// Appends eoc-step / eoc-lsq rows over every error column that is positive
// in all level records.
void append_eoc(std::vector<StudyRecord>& recs) {
  const size_t n = recs.size();
  if (n < 2) return;  // step slopes need two levels, the lsq fit three
  struct Col {
    double StudyRecord::* field;
    int interior = -1;
  };
  auto get = [](const StudyRecord& r, const Col& c) {
    return c.interior >= 0 ? r.interior_err[static_cast<size_t>(c.interior)]
                           : r.*(c.field);
  };
  auto set = [](StudyRecord& r, const Col& c, double v) {
    if (c.interior >= 0)
      r.interior_err[static_cast<size_t>(c.interior)] = v;
    else
      r.*(c.field) = v;
  };
  const std::vector<Col> cols = {
      {&StudyRecord::dual_norm_flux},  {&StudyRecord::half_norm_primal},
      {&StudyRecord::l2_primal},       {&StudyRecord::l2_flux},
      {&StudyRecord::b_norm_total},    {nullptr, 0},
      {nullptr, 1},                    {nullptr, 2}};

  auto blank_row = [&](const char* kind) {
    StudyRecord e;
    e.bc_kind = kind;
    e.k = recs[0].k;
    e.l = recs[0].l;
    e.level = 0;
    e.h = kNaN;
    e.dofs = 0;
    e.beta = e.beta_D = e.beta_N = e.beta_R = e.eps = kNaN;
    e.dual_norm_flux = e.half_norm_primal = e.l2_primal = e.l2_flux =
        e.b_norm_total = kNaN;
    e.interior_err = {kNaN, kNaN, kNaN};
    e.assembly_seconds = e.solve_seconds = kNaN;
    return e;
  };

  std::vector<StudyRecord> extra;
  for (size_t i = 1; i < n; ++i) {
    StudyRecord e = blank_row("eoc-step");
    e.level = recs[i].level;
    e.h = recs[i].h;
    for (const auto& c : cols) {
      const double e0 = get(recs[i - 1], c), e1 = get(recs[i], c);
      if (e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) && std::isfinite(e1))
        set(e, c, std::log(e0 / e1) / std::log(recs[i - 1].h / recs[i].h));
    }
    extra.push_back(std::move(e));
  }
  if (n >= 3) {
    StudyRecord e = blank_row("eoc-lsq");
    for (const auto& c : cols) {
      std::vector<std::pair<double, double>> pts;
      for (size_t i = 0; i < n; ++i) {
        const double v = get(recs[i], c);
        if (v > 0.0 && std::isfinite(v)) pts.emplace_back(recs[i].h, v);
      }
      if (pts.size() == n) set(e, c, eoc(pts).least_squares);
    }
    extra.push_back(std::move(e));
  }
  for (auto& row : extra) recs.push_back(std::move(row));
}

}  // namespace

std::vector<StudyRecord> run_convergence(const StudyOptions& options) {
  if (options.level_min < 1 || options.level_max < options.level_min)
    throw std::invalid_argument("run_convergence: bad level range");
  std::vector<StudyRecord> recs;
  for (int lev = options.level_min; lev <= options.level_max; ++lev) {
    const Workspace ws = make_workspace(options.bc, options.l, lev);
    recs.push_back(run_level(ws, options));
  }
  append_eoc(recs);
  return recs;
}

std::vector<StudyRecord> run_beta_sweep(const StudyOptions& options, int level,
                                        std::vector<double> betas) {
  if (options.bc == BCKind::StdDirichlet || options.bc == BCKind::StdRobin)
    throw std::invalid_argument("run_beta_sweep: std methods have no penalty");
  if (betas.empty()) {
    if (options.bc != BCKind::Robin) betas.push_back(0.0);
    for (int e = -6; e <= 6; ++e) betas.push_back(std::pow(10.0, e));
  }
  const Workspace ws = make_workspace(options.bc, options.l, level);
  std::vector<StudyRecord> recs;
  for (const double b : betas) {
    StudyOptions o = options;
    o.penalty.beta = b;
    for (const bool pre : {true, false}) {
      o.gmres.precond = pre;
      recs.push_back(run_level(ws, o));
    }
  }
  return recs;
}

std::vector<StudyRecord> run_eps_beta_sweep(const StudyOptions& options,
                                            int level,
                                            std::vector<double> eps_grid,
                                            std::vector<double> beta_grid) {
  if (options.bc != BCKind::Robin)
    throw std::invalid_argument("run_eps_beta_sweep: robin only");
  if (eps_grid.empty())
    for (int e = -2; e <= 2; ++e) eps_grid.push_back(std::pow(10.0, e));
  if (beta_grid.empty()) beta_grid = {1e-8, 1e-6, 1e-4, 1e-2, 1.0};
  const Workspace ws = make_workspace(options.bc, options.l, level);
  std::vector<StudyRecord> recs;
  for (const double eps : eps_grid) {
    for (const double b : beta_grid) {
      StudyOptions o = options;
      o.penalty.eps = eps;
      o.penalty.beta = b;
      recs.push_back(run_level(ws, o));
    }
  }
  return recs;
}

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifyReport run_verify(int level, const std::string& dump_dir,
                        const std::string& load_dir) {
  if (level < 1) throw std::invalid_argument("run_verify: level must be >= 1");
  VerifyReport report;
  report.level = level;
  auto push = [&report](const std::string& name, double value, double lo,
                        double hi) {
    report.checks.push_back({name, value, lo, hi, value >= lo && value <= hi});
    return report.checks.back().pass;
  };

  const TriangleSurfaceMesh mesh =
      tag_regions(make_icosphere(level), WholeBoundary{});
  const FunctionSpace primal(mesh, Family::P1Continuous);
  const FunctionSpace flux(mesh, Family::P0Discontinuous);
  BoundaryOperators ops;
  ops.primal = &primal;
  ops.flux = &flux;
  const bool loading = !load_dir.empty();
  if (loading) {
    const char* names[4] = {"V.op", "K.op", "Kp.op", "W.op"};
    Eigen::MatrixXd* dst[4] = {&ops.V, &ops.K, &ops.Kp, &ops.W};
    for (int i = 0; i < 4; ++i) {
      try {
        *dst[i] = load_operator(load_dir + "/" + names[i]).m;
      } catch (const std::exception&) {
        push(std::string("load:") + names[i], kNaN, 0.0, 0.0);
        return report;
      }
    }
    const long np = primal.dof_count(), nf = flux.dof_count();
    if (ops.V.rows() != nf || ops.V.cols() != nf || ops.K.rows() != nf ||
        ops.K.cols() != np || ops.Kp.rows() != np || ops.Kp.cols() != nf ||
        ops.W.rows() != np || ops.W.cols() != np) {
      push("dimensions", kNaN, 0.0, 0.0);
      return report;
    }
  } else {
    ops = assemble_operators(primal, flux);
    if (!dump_dir.empty()) {
      save_operator({OperatorKind::SingleLayer, &flux, &flux, ops.V},
                    dump_dir + "/V.op");
      save_operator({OperatorKind::DoubleLayer, &flux, &primal, ops.K},
                    dump_dir + "/K.op");
      save_operator({OperatorKind::AdjointDoubleLayer, &primal, &flux, ops.Kp},
                    dump_dir + "/Kp.op");
      save_operator({OperatorKind::Hypersingular, &primal, &primal, ops.W},
                    dump_dir + "/W.op");
    }
  }

  const SparseMatrix Mff = assemble_mass(flux, flux);
  const SparseMatrix Mfp = assemble_mass(flux, primal);
  const Eigen::VectorXd onesf = Eigen::VectorXd::Ones(flux.dof_count());
  const Eigen::VectorXd onesp = Eigen::VectorXd::Ones(primal.dof_count());

  {
    const double tol = level >= 3 ? 0.02 : 0.05;
    const double ratio = onesf.dot(ops.V * onesf) / onesf.dot(Mff * onesf);
    push("single-layer-uniform", ratio, 1.0 - tol, 1.0 + tol);
  }
  {
    const Eigen::VectorXd ref = 0.5 * (Mfp * onesp);
    const double rel = (ops.K * onesp + ref).norm() / ref.norm();
    push("double-layer-constant", rel, 0.0, 0.01);
  }
  {
    const double wmax = ops.W.cwiseAbs().maxCoeff();
    push("hypersingular-kernel",
         (ops.W * onesp).cwiseAbs().maxCoeff() / wmax, 0.0, 1e-8);
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (ops.V + ops.V.transpose()), Eigen::EigenvaluesOnly);
    push("single-layer-spd", es.eigenvalues().minCoeff(), 1e-12, 1e300);
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (ops.W + ops.W.transpose()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev.maxCoeff();
    push("hypersingular-psd", ev[0] / emax, -1e-10, 1e-8);
    push("hypersingular-null-separation", ev[1] / emax, 1e-8, 1e300);
  }
  {
    const double tol = level >= 2 ? 0.02 : 0.10;
    const Eigen::VectorXd z =
        interpolate(flux, [](const Eigen::Vector3d& p) { return p.z(); });
    const double q = z.dot(ops.V * z) / z.dot(Mff * z);
    push("single-layer-rayleigh-z", q, (1.0 - tol) / 3.0, (1.0 + tol) / 3.0);
  }
  push("adjoint-transpose",
       (ops.Kp - ops.K.transpose()).cwiseAbs().maxCoeff() /
           std::max(1.0, ops.K.cwiseAbs().maxCoeff()),
       0.0, 1e-12);

  if (!loading && level >= 2) {
    const ManufacturedSolution ms = manufactured(BCKind::Dirichlet);
    std::vector<double> res;
    for (int lev = 1; lev <= level; ++lev) {
      if (lev == level) {
        res.push_back(calderon_residual(ops, interpolate(primal, ms.u),
                                        interpolate(flux, ms.g_N)));
        continue;
      }
      const TriangleSurfaceMesh m =
          tag_regions(make_icosphere(lev), WholeBoundary{});
      const FunctionSpace p(m, Family::P1Continuous);
      const FunctionSpace f(m, Family::P0Discontinuous);
      const BoundaryOperators o = assemble_operators(p, f);
      res.push_back(
          calderon_residual(o, interpolate(p, ms.u), interpolate(f, ms.g_N)));
    }
    double worst = 0.0;
    for (size_t i = 1; i < res.size(); ++i)
      worst = std::max(worst, res[i] / res[i - 1]);
    push("calderon-decay", worst, 0.0, 0.999);
  }
  return report;
}

}  // namespace bem
