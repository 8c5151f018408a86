// bemstudy: batch study harness for the weak-boundary-condition BEM library.
// Subcommands: convergence, sweep-beta, sweep-eps-beta, verify.
// Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bem/study.hpp"

namespace {

struct CommonArgs {
  std::string bc = "dirichlet";
  int k = 1;
  int l = 1;
  double beta = 0.1;
  double eps = 1.0;
  std::string law = "constant";
  std::string variant = "numerical";
  double beta_d = 0.0;
  double beta_n = 0.0;
  double tol = 1e-8;
  int maxit = 1000;
  bool no_precond = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_bc) {
  if (with_bc)
    cmd->add_option("--bc", a.bc, "boundary condition")
        ->check(CLI::IsMember({"dirichlet", "neumann", "mixed", "robin",
                               "std-dirichlet", "std-robin"}));
  cmd->add_option("--k", a.k, "primal order (only 1)");
  cmd->add_option("--l", a.l, "flux order: 0 or 1");
  cmd->add_option("--beta", a.beta, "base penalty constant");
  cmd->add_option("--eps", a.eps, "Robin coefficient");
  cmd->add_option("--law", a.law, "penalty scaling law")
      ->check(CLI::IsMember({"h-scaled", "constant", "explicit"}));
  cmd->add_option("--variant", a.variant, "Robin beta_R formula")
      ->check(CLI::IsMember({"numerical", "theory"}));
  cmd->add_option("--beta-d", a.beta_d, "explicit beta_D (law = explicit)");
  cmd->add_option("--beta-n", a.beta_n, "explicit beta_N (law = explicit)");
  cmd->add_option("--tol", a.tol, "GMRES relative tolerance");
  cmd->add_option("--maxit", a.maxit, "GMRES iteration cap");
  cmd->add_flag("--no-precond", a.no_precond, "disable the block-mass preconditioner");
  cmd->add_option("--out", a.out, "output CSV path (default stdout)");
}

bem::StudyOptions to_options(const CommonArgs& a) {
  bem::StudyOptions o;
  o.bc = bem::bc_kind_from_string(a.bc);
  o.k = a.k;
  o.l = a.l;
  o.penalty.beta = a.beta;
  o.penalty.eps = a.eps;
  if (a.law == "h-scaled")
    o.penalty.law = bem::ScalingLaw::HScaled;
  else if (a.law == "constant")
    o.penalty.law = bem::ScalingLaw::Constant;
  else
    o.penalty.law = bem::ScalingLaw::Explicit;
  o.penalty.variant = a.variant == "theory"
                          ? bem::RobinBetaVariant::TheorySection
                          : bem::RobinBetaVariant::NumericalSection;
  o.penalty.explicit_beta_D = a.beta_d;
  o.penalty.explicit_beta_N = a.beta_n;
  o.gmres.tol = a.tol;
  o.gmres.max_iter = a.maxit;
  o.gmres.precond = !a.no_precond;
  return o;
}

void parse_levels(const std::string& spec, int& lo, int& hi) {
  const auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(spec);
    } else {
      lo = std::stoi(spec.substr(0, dots));
      hi = std::stoi(spec.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad --levels value '" + spec +
                                "', expected N or A..B");
  }
  if (lo < 1 || hi < lo)
    throw std::invalid_argument("bad --levels range '" + spec + "'");
}

void emit(const std::string& out, const std::vector<bem::StudyRecord>& recs) {
  if (out.empty()) {
    bem::write_csv(std::cout, recs);
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open output file " + out);
  bem::write_csv(f, recs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary element convergence and conditioning studies"};
  app.require_subcommand(1);

  CommonArgs conv_args;
  std::string levels = "1..3";
  auto* conv = app.add_subcommand(
      "convergence", "error norms and iteration counts over mesh levels");
  add_common(conv, conv_args, true);
  conv->add_option("--levels", levels, "level range A..B (default 1..3)");

  CommonArgs sb_args;
  int sb_level = 2;
  std::vector<double> sb_betas;
  auto* sb = app.add_subcommand("sweep-beta",
                                "error and iterations across a beta grid");
  add_common(sb, sb_args, true);
  sb->add_option("--level", sb_level, "mesh level (default 2)");
  sb->add_option("--betas", sb_betas, "explicit beta grid values");

  CommonArgs eb_args;
  eb_args.bc = "robin";
  int eb_level = 2;
  std::vector<double> eb_eps, eb_betas;
  auto* eb = app.add_subcommand("sweep-eps-beta",
                                "Robin error over an (eps, beta) grid");
  add_common(eb, eb_args, false);
  eb->add_option("--level", eb_level, "mesh level (default 2)");
  eb->add_option("--eps-grid", eb_eps, "explicit eps grid values");
  eb->add_option("--betas", eb_betas, "explicit beta grid values");

  int v_level = 3;
  std::string v_dump, v_load, v_out;
  auto* ver = app.add_subcommand("verify", "operator sanity suite");
  ver->add_option("--level", v_level, "mesh level (default 3)");
  ver->add_option("--dump-ops", v_dump, "save assembled operators to DIR");
  ver->add_option("--load-ops", v_load, "load operators from DIR instead of assembling");
  ver->add_option("--out", v_out, "also write the checks as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // 0 for --help, usage error otherwise
  }

  try {
    if (conv->parsed()) {
      bem::StudyOptions o = to_options(conv_args);
      parse_levels(levels, o.level_min, o.level_max);
      emit(conv_args.out, bem::run_convergence(o));
    } else if (sb->parsed()) {
      emit(sb_args.out,
           bem::run_beta_sweep(to_options(sb_args), sb_level, sb_betas));
    } else if (eb->parsed()) {
      emit(eb_args.out, bem::run_eps_beta_sweep(to_options(eb_args), eb_level,
                                                eb_eps, eb_betas));
    } else if (ver->parsed()) {
      const bem::VerifyReport rep = bem::run_verify(v_level, v_dump, v_load);
      std::ostringstream csv;
      csv << "check,value,lo,hi,pass\n";
      for (const auto& c : rep.checks) {
        std::printf("%-34s %s  value=%-14.6g range=[%g, %g]\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.value, c.lo, c.hi);
        csv << c.name << ',' << c.value << ',' << c.lo << ',' << c.hi << ','
            << (c.pass ? 1 : 0) << "\n";
      }
      if (!v_out.empty()) {
        std::ofstream f(v_out);
        if (!f) throw std::runtime_error("cannot open output file " + v_out);
        f << csv.str();
      }
      if (!rep.all_pass()) {
        std::fprintf(stderr, "verification failed\n");
        return 3;
      }
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
