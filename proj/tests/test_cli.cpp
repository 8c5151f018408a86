#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bem/mesh.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "bem_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path log = work_dir() / ("run" + std::to_string(counter++) + ".log");
  const std::string cmd =
      std::string("\"") + BEMSTUDY_BIN + "\" " + args + " > " + log.string() +
      " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  std::ifstream f(log);
  std::ostringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

constexpr int kH = 4, kDofs = 5, kIterations = 19, kPrecond = 20;

}  // namespace

TEST_CASE("convergence run emits one row per level with exact doubles") {
  const fs::path csv = work_dir() / "robin_l1.csv";
  const RunResult r = run("convergence --bc robin --levels 1 --out " +
                          csv.string());
  CHECK(r.exit_code == 0);

  const std::vector<std::string> lines = read_lines(csv);
  REQUIRE(lines.size() == 2);  // header + one level, no slope rows
  CHECK(lines[0].rfind("bc_kind,k,l,level,h,dofs,beta,", 0) == 0);

  const std::vector<std::string> row = split(lines[1]);
  REQUIRE(row.size() == 23);
  CHECK(row[0] == "robin");
  CHECK(row[1] == "1");
  CHECK(row[2] == "1");
  CHECK(row[3] == "1");
  CHECK(row[kDofs] == "84");  // 42 vertex dofs for each trace
  CHECK(row[kPrecond] == "block-mass");

  // %.17g serialisation is lossless for the geometry column
  const double h = std::stod(row[kH]);
  CHECK(h == bem::mesh_size(bem::make_icosphere(1)));
}

TEST_CASE("convergence output is deterministic apart from timings") {
  const fs::path a = work_dir() / "det_a.csv";
  const fs::path b = work_dir() / "det_b.csv";
  const std::string args = "convergence --bc dirichlet --l 0 --levels 1..2";
  CHECK(run(args + " --out " + a.string()).exit_code == 0);
  CHECK(run(args + " --out " + b.string()).exit_code == 0);

  const auto la = read_lines(a), lb = read_lines(b);
  REQUIRE(la.size() == lb.size());
  REQUIRE(la.size() >= 4);  // header, two levels, one slope row
  for (size_t i = 0; i < la.size(); ++i) {
    const auto fa = split(la[i]), fb = split(lb[i]);
    REQUIRE(fa.size() == fb.size());
    for (size_t j = 0; j + 2 < fa.size(); ++j)  // last two columns are timings
      CHECK(fa[j] == fb[j]);
  }
}

TEST_CASE("verify passes on a fresh mesh and fails on corrupted operators") {
  const fs::path ops = work_dir() / "ops_dump";
  fs::create_directories(ops);

  const RunResult fresh =
      run("verify --level 1 --dump-ops " + ops.string());
  CHECK(fresh.exit_code == 0);
  CHECK(fresh.output.find("PASS") != std::string::npos);
  CHECK(fresh.output.find("FAIL") == std::string::npos);
  CHECK(fs::exists(ops / "V.op"));
  CHECK(fs::exists(ops / "W.op"));

  {  // poison one payload double (header stays intact)
    std::fstream f(ops / "V.op", std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekp(100);
    const unsigned char nan_bytes[8] = {0xFF, 0xFF, 0xFF, 0xFF,
                                        0xFF, 0xFF, 0xFF, 0xFF};
    f.write(reinterpret_cast<const char*>(nan_bytes), 8);
  }
  const RunResult poisoned =
      run("verify --level 1 --load-ops " + ops.string());
  CHECK(poisoned.exit_code == 3);
  CHECK(poisoned.output.find("FAIL") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("convergence --bc std-robin --l 0 --levels 1").exit_code == 1);
  CHECK(run("convergence --levels 3..1").exit_code == 1);
  CHECK(run("convergence --levels nope").exit_code == 1);
  CHECK(run("convergence --bc periodic --levels 1").exit_code == 1);
  CHECK(run("nonsense").exit_code == 1);
  CHECK(run("").exit_code == 1);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("eps-beta sweep covers the full default grid") {
  const fs::path csv = work_dir() / "eps_beta.csv";
  const RunResult r = run("sweep-eps-beta --level 1 --out " + csv.string());
  CHECK(r.exit_code == 0);
  const auto lines = read_lines(csv);
  REQUIRE(lines.size() == 26);  // header + 5 eps x 5 beta
  for (size_t i = 1; i < lines.size(); ++i) CHECK(split(lines[i])[0] == "robin");
}

TEST_CASE("beta sweep reports the conditioning crossover") {
  const fs::path csv = work_dir() / "beta_sweep.csv";
  const RunResult r = run(
      "sweep-beta --bc dirichlet --level 2 --betas 0.1 10000 --out " +
      csv.string());
  CHECK(r.exit_code == 0);
  const auto lines = read_lines(csv);
  REQUIRE(lines.size() == 5);  // header + (precond, none) per beta

  int pre_low = -1, pre_high = -1, raw_low = -1, raw_high = -1;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    const double beta = std::stod(f[6]);
    const int its = std::stoi(f[kIterations]);
    const bool pre = f[kPrecond] == "block-mass";
    if (beta == 0.1) (pre ? pre_low : raw_low) = its;
    else (pre ? pre_high : raw_high) = its;
  }
  REQUIRE(pre_low > 0);
  REQUIRE(pre_high > 0);
  REQUIRE(raw_low > 0);
  REQUIRE(raw_high > 0);
  // large beta hurts the raw system but helps the mass-preconditioned one
  CHECK(raw_high > raw_low);
  CHECK(pre_high < pre_low);
}
