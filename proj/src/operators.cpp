#include "bem/operators.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace bem {

namespace {
constexpr double kFourPi = 4.0 * M_PI;
}

const char* operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::SingleLayer: return "V";
    case OperatorKind::DoubleLayer: return "K";
    case OperatorKind::AdjointDoubleLayer: return "K'";
    case OperatorKind::Hypersingular: return "W";
  }
  return "?";
}

double GreensKernel::value(const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
  return 1.0 / (kFourPi * (x - y).norm());
}

double GreensKernel::dn_y(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                          const Eigen::Vector3d& normal_y) {
  const Eigen::Vector3d d = x - y;
  const double r = d.norm();
  return d.dot(normal_y) / (kFourPi * r * r * r);
}

double GreensKernel::dn_x(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                          const Eigen::Vector3d& normal_x) {
  const Eigen::Vector3d d = x - y;
  const double r = d.norm();
  return -d.dot(normal_x) / (kFourPi * r * r * r);
}

namespace {

int assembly_thread_count() {
  const char* env = std::getenv("BEM_ASSEMBLY_THREADS");
  if (!env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  if (n < 1) return 1;
  return static_cast<int>(n > 8 ? 8 : n);
}

// Shared tables for one pair sweep over the mesh.
struct SweepContext {
  const TriangleSurfaceMesh* mesh;
  const FunctionSpace* primal;  // may be null when only V is wanted
  const FunctionSpace* flux;    // may be null when only W is wanted
  bool wantV, wantK, wantKp, wantW;
  bool p0flux;
  long F = 0;
  int nq = 0;                    // far rule size
  Eigen::MatrixXd bar;           // far rule barycentric rows
  std::vector<double> P;         // far phys points, (f*nq+q)*3
  std::vector<double> Wt;        // far weights incl. jacobian
  std::vector<double> nrm;       // unit normals, f*3
  std::vector<double> cen;       // centroids, f*3
  std::vector<double> dia;       // diameters
  std::vector<double> cu;        // curl rows, f*9
  std::vector<std::vector<int>> v2t;
  TriangleRule near_rule;
  PairRule rule_coincident, rule_edge, rule_vertex;
};

SweepContext make_context(const TriangleSurfaceMesh& mesh,
                          const FunctionSpace* primal,
                          const FunctionSpace* flux,
                          const PairQuadratureRules& rules, bool wantV,
                          bool wantK, bool wantKp, bool wantW) {
  SweepContext c;
  c.mesh = &mesh;
  c.primal = primal;
  c.flux = flux;
  c.wantV = wantV;
  c.wantK = wantK;
  c.wantKp = wantKp;
  c.wantW = wantW;
  c.p0flux = !flux || flux->family() == Family::P0Discontinuous;
  c.F = mesh.num_triangles();
  const TriangleRule far = triangle_rule(rules.regular_order);
  c.nq = static_cast<int>(far.weights.size());
  c.bar = far.points;
  c.P.resize(static_cast<size_t>(c.F) * c.nq * 3);
  c.Wt.resize(static_cast<size_t>(c.F) * c.nq);
  c.nrm.resize(static_cast<size_t>(c.F) * 3);
  c.cen.resize(static_cast<size_t>(c.F) * 3);
  c.dia.resize(static_cast<size_t>(c.F));
  c.cu.resize(static_cast<size_t>(c.F) * 9);
  for (long f = 0; f < c.F; ++f) {
    const Eigen::Vector3d p0 = mesh.corner(f, 0);
    const Eigen::Vector3d p1 = mesh.corner(f, 1);
    const Eigen::Vector3d p2 = mesh.corner(f, 2);
    for (int q = 0; q < c.nq; ++q) {
      const Eigen::Vector3d p =
          far.points(q, 0) * p0 + far.points(q, 1) * p1 + far.points(q, 2) * p2;
      for (int d = 0; d < 3; ++d) c.P[(f * c.nq + q) * 3 + d] = p[d];
      c.Wt[f * c.nq + q] = far.weights[q] * mesh.jacobian(f);
    }
    const Eigen::Vector3d n = mesh.normal(f);
    const Eigen::Vector3d ce = mesh.centroid(f);
    for (int d = 0; d < 3; ++d) {
      c.nrm[f * 3 + d] = n[d];
      c.cen[f * 3 + d] = ce[d];
    }
    c.dia[f] = mesh.diameter(f);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d cr = mesh.curl(f, k);
      for (int d = 0; d < 3; ++d) c.cu[f * 9 + k * 3 + d] = cr[d];
    }
  }
  c.v2t.resize(static_cast<size_t>(mesh.num_vertices()));
  for (long f = 0; f < c.F; ++f)
    for (int k = 0; k < 3; ++k)
      c.v2t[static_cast<size_t>(mesh.triangles()(f, k))].push_back(
          static_cast<int>(f));
  c.near_rule = triangle_rule(rules.near_order);
  c.rule_coincident = singular_pair_rule(PairClass::Coincident, rules.singular_order);
  c.rule_edge = singular_pair_rule(PairClass::Edge, rules.singular_order);
  c.rule_vertex = singular_pair_rule(PairClass::Vertex, rules.singular_order);
  return c;
}

// Accumulated Galerkin contributions of one ordered pair (ta, tb).
struct PairBlocks {
  double gsum = 0.0;   // weighted double integral of G
  double Vb[9] = {0};  // flux x flux   (p0: Vb[0] only)
  double Kb[9] = {0};  // flux x primal (p0 test: Kb[0..2])
  double Pb[9] = {0};  // primal x flux (p0 trial: Pb[0..2])
};

// Far pair: product rule on the precomputed tables.
void far_pair(const SweepContext& c, long ta, long tb, PairBlocks& blk) {
  const int nq = c.nq;
  const double* Pa = &c.P[static_cast<size_t>(ta) * nq * 3];
  const double* Pb = &c.P[static_cast<size_t>(tb) * nq * 3];
  const double* Wa = &c.Wt[static_cast<size_t>(ta) * nq];
  const double* Wb = &c.Wt[static_cast<size_t>(tb) * nq];
  const double* na = &c.nrm[ta * 3];
  const double* nb = &c.nrm[tb * 3];
  const bool dbl = c.wantK || c.wantKp;
  if (c.p0flux) {
    double gsum = 0.0, kb0 = 0.0, kb1 = 0.0, kb2 = 0.0;
    double pa0 = 0.0, pa1 = 0.0, pa2 = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double x0 = Pa[i * 3], x1 = Pa[i * 3 + 1], x2 = Pa[i * 3 + 2];
      const double wa = Wa[i];
      double kpi = 0.0;
      for (int j = 0; j < nq; ++j) {
        const double d0 = x0 - Pb[j * 3];
        const double d1 = x1 - Pb[j * 3 + 1];
        const double d2 = x2 - Pb[j * 3 + 2];
        const double r2 = d0 * d0 + d1 * d1 + d2 * d2;
        const double r = std::sqrt(r2);
        const double w = wa * Wb[j];
        gsum += w / (kFourPi * r);
        if (dbl) {
          const double rf = w / (kFourPi * r2 * r);
          const double kk = rf * (d0 * nb[0] + d1 * nb[1] + d2 * nb[2]);
          const double b0 = c.bar(j, 0), b1 = c.bar(j, 1), b2 = c.bar(j, 2);
          kb0 += kk * b0;
          kb1 += kk * b1;
          kb2 += kk * b2;
          kpi -= rf * (d0 * na[0] + d1 * na[1] + d2 * na[2]);
        }
      }
      pa0 += kpi * c.bar(i, 0);
      pa1 += kpi * c.bar(i, 1);
      pa2 += kpi * c.bar(i, 2);
    }
    blk.gsum = gsum;
    blk.Vb[0] = gsum;
    blk.Kb[0] = kb0;
    blk.Kb[1] = kb1;
    blk.Kb[2] = kb2;
    blk.Pb[0] = pa0;
    blk.Pb[1] = pa1;
    blk.Pb[2] = pa2;
    return;
  }
  double gsum = 0.0;
  for (int i = 0; i < nq; ++i) {
    const double x0 = Pa[i * 3], x1 = Pa[i * 3 + 1], x2 = Pa[i * 3 + 2];
    const double wa = Wa[i];
    double gb[3] = {0, 0, 0}, kb[3] = {0, 0, 0}, pb[3] = {0, 0, 0};
    for (int j = 0; j < nq; ++j) {
      const double d0 = x0 - Pb[j * 3];
      const double d1 = x1 - Pb[j * 3 + 1];
      const double d2 = x2 - Pb[j * 3 + 2];
      const double r2 = d0 * d0 + d1 * d1 + d2 * d2;
      const double r = std::sqrt(r2);
      const double w = wa * Wb[j];
      const double G = w / (kFourPi * r);
      const double b0 = c.bar(j, 0), b1 = c.bar(j, 1), b2 = c.bar(j, 2);
      gb[0] += G * b0;
      gb[1] += G * b1;
      gb[2] += G * b2;
      if (dbl) {
        const double rf = w / (kFourPi * r2 * r);
        const double kk = rf * (d0 * nb[0] + d1 * nb[1] + d2 * nb[2]);
        const double kp = -rf * (d0 * na[0] + d1 * na[1] + d2 * na[2]);
        kb[0] += kk * b0;
        kb[1] += kk * b1;
        kb[2] += kk * b2;
        pb[0] += kp * b0;
        pb[1] += kp * b1;
        pb[2] += kp * b2;
      }
    }
    gsum += gb[0] + gb[1] + gb[2];
    for (int a = 0; a < 3; ++a) {
      const double ba = c.bar(i, a);
      for (int b = 0; b < 3; ++b) {
        blk.Vb[a * 3 + b] += ba * gb[b];
        blk.Kb[a * 3 + b] += ba * kb[b];
        blk.Pb[a * 3 + b] += ba * pb[b];
      }
    }
  }
  blk.gsum = gsum;
}

// Near or singular pair: transformed rules on permuted vertex orders.
void close_pair(const SweepContext& c, long ta, long tb, const PairOrder& po,
                PairBlocks& blk) {
  const TriangleSurfaceMesh& mesh = *c.mesh;
  const double* na = &c.nrm[ta * 3];
  const double* nb = &c.nrm[tb * 3];
  const double jac = mesh.jacobian(ta) * mesh.jacobian(tb);
  const bool coincident = po.cls == PairClass::Coincident;
  const bool dbl = (c.wantK || c.wantKp) && !coincident;

  // node list: x, y, local barycentric rows, weight (incl. jacobians)
  long nn = 0;
  const PairRule* pr = nullptr;
  if (po.cls == PairClass::Disjoint) {
    nn = c.near_rule.weights.size() * c.near_rule.weights.size();
  } else {
    pr = po.cls == PairClass::Coincident ? &c.rule_coincident
         : po.cls == PairClass::Edge     ? &c.rule_edge
                                         : &c.rule_vertex;
    nn = pr->weights.size();
  }

  // permuted corner coordinates and permutation to local positions
  double va[3][3], vb[3][3];
  int la[3], lb[3];
  const auto& T = mesh.triangles();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d A = mesh.vertex(po.order_a[static_cast<size_t>(k)]);
    const Eigen::Vector3d B = mesh.vertex(po.order_b[static_cast<size_t>(k)]);
    for (int d = 0; d < 3; ++d) {
      va[k][d] = A[d];
      vb[k][d] = B[d];
    }
    la[k] = lb[k] = -1;
    for (int r = 0; r < 3; ++r) {
      if (T(ta, r) == po.order_a[static_cast<size_t>(k)]) la[k] = r;
      if (T(tb, r) == po.order_b[static_cast<size_t>(k)]) lb[k] = r;
    }
  }

  const int nrq = static_cast<int>(c.near_rule.weights.size());
  for (long n = 0; n < nn; ++n) {
    double ba[3], bb[3], w;
    if (pr) {
      ba[0] = pr->bary_a(n, 0), ba[1] = pr->bary_a(n, 1), ba[2] = pr->bary_a(n, 2);
      bb[0] = pr->bary_b(n, 0), bb[1] = pr->bary_b(n, 1), bb[2] = pr->bary_b(n, 2);
      w = pr->weights[n] * jac;
    } else {
      const int i = static_cast<int>(n / nrq), j = static_cast<int>(n % nrq);
      for (int k = 0; k < 3; ++k) {
        ba[k] = c.near_rule.points(i, k);
        bb[k] = c.near_rule.points(j, k);
      }
      w = c.near_rule.weights[i] * c.near_rule.weights[j] * jac;
    }
    double x[3], y[3];
    for (int d = 0; d < 3; ++d) {
      x[d] = ba[0] * va[0][d] + ba[1] * va[1][d] + ba[2] * va[2][d];
      y[d] = bb[0] * vb[0][d] + bb[1] * vb[1][d] + bb[2] * vb[2][d];
    }
    const double d0 = x[0] - y[0], d1 = x[1] - y[1], d2 = x[2] - y[2];
    const double r2 = d0 * d0 + d1 * d1 + d2 * d2;
    const double r = std::sqrt(r2);
    const double G = w / (kFourPi * r);
    double kk = 0.0, kp = 0.0;
    if (dbl) {  // double-layer kernels vanish on coincident flat panels
      const double rf = w / (kFourPi * r2 * r);
      kk = rf * (d0 * nb[0] + d1 * nb[1] + d2 * nb[2]);
      kp = -rf * (d0 * na[0] + d1 * na[1] + d2 * na[2]);
    }
    // local barycentric values at triangle-local positions
    double bal[3], bbl[3];
    for (int k = 0; k < 3; ++k) {
      bal[la[k]] = ba[k];
      bbl[lb[k]] = bb[k];
    }
    blk.gsum += G;
    if (c.p0flux) {
      blk.Vb[0] += G;
      for (int b = 0; b < 3; ++b) blk.Kb[b] += kk * bbl[b];
      for (int a = 0; a < 3; ++a) blk.Pb[a] += kp * bal[a];
    } else {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          blk.Vb[a * 3 + b] += G * bal[a] * bbl[b];
          blk.Kb[a * 3 + b] += kk * bal[a] * bbl[b];
          blk.Pb[a * 3 + b] += kp * bal[a] * bbl[b];
        }
    }
  }
}

void scatter_pair(const SweepContext& c, long ta, long tb,
                  const PairBlocks& blk, Eigen::MatrixXd* V, Eigen::MatrixXd* K,
                  Eigen::MatrixXd* Kp, Eigen::MatrixXd* W) {
  long pa[3] = {0, 0, 0}, pb[3] = {0, 0, 0};
  if (c.primal)
    for (int k = 0; k < 3; ++k) {
      pa[k] = c.primal->dof(ta, k);
      pb[k] = c.primal->dof(tb, k);
    }
  if (c.p0flux) {
    if (V) (*V)(ta, tb) += blk.Vb[0];
    if (K)
      for (int b = 0; b < 3; ++b) (*K)(ta, pb[b]) += blk.Kb[b];
    if (Kp)
      for (int a = 0; a < 3; ++a) (*Kp)(pa[a], tb) += blk.Pb[a];
  } else {
    long fa[3], fb[3];
    for (int k = 0; k < 3; ++k) {
      fa[k] = c.flux->dof(ta, k);
      fb[k] = c.flux->dof(tb, k);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (V) (*V)(fa[a], fb[b]) += blk.Vb[a * 3 + b];
        if (K) (*K)(fa[a], pb[b]) += blk.Kb[a * 3 + b];
        if (Kp) (*Kp)(pa[a], fb[b]) += blk.Pb[a * 3 + b];
      }
  }
  if (W) {
    const double* ca = &c.cu[ta * 9];
    const double* cb = &c.cu[tb * 9];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double dot = ca[a * 3] * cb[b * 3] + ca[a * 3 + 1] * cb[b * 3 + 1] +
                           ca[a * 3 + 2] * cb[b * 3 + 2];
        (*W)(pa[a], pb[b]) += blk.gsum * dot;
      }
  }
}

void sweep_range(const SweepContext& c, long ta0, long ta1, Eigen::MatrixXd* V,
                 Eigen::MatrixXd* K, Eigen::MatrixXd* Kp, Eigen::MatrixXd* W) {
  const TriangleSurfaceMesh& mesh = *c.mesh;
  const auto& T = mesh.triangles();
  std::vector<char> adjacent(static_cast<size_t>(c.F), 0);
  std::vector<int> touched;
  for (long ta = ta0; ta < ta1; ++ta) {
    touched.clear();
    for (int k = 0; k < 3; ++k)
      for (int t : c.v2t[static_cast<size_t>(T(ta, k))])
        if (!adjacent[static_cast<size_t>(t)]) {
          adjacent[static_cast<size_t>(t)] = 1;
          touched.push_back(t);
        }
    const double* cea = &c.cen[ta * 3];
    const double da = c.dia[ta];
    for (long tb = 0; tb < c.F; ++tb) {
      const double e0 = cea[0] - c.cen[tb * 3];
      const double e1 = cea[1] - c.cen[tb * 3 + 1];
      const double e2 = cea[2] - c.cen[tb * 3 + 2];
      const double cd = std::sqrt(e0 * e0 + e1 * e1 + e2 * e2);
      const double dm = da > c.dia[tb] ? da : c.dia[tb];
      PairBlocks blk;
      if (adjacent[static_cast<size_t>(tb)] || cd < 2.0 * dm) {
        const PairOrder po = classify_pair(mesh, ta, tb);
        close_pair(c, ta, tb, po, blk);
      } else {
        far_pair(c, ta, tb, blk);
      }
      scatter_pair(c, ta, tb, blk, V, K, Kp, W);
    }
    for (int t : touched) adjacent[static_cast<size_t>(t)] = 0;
  }
}

struct SweepResult {
  Eigen::MatrixXd V, K, Kp, W;
};

SweepResult run_sweep(const TriangleSurfaceMesh& mesh,
                      const FunctionSpace* primal, const FunctionSpace* flux,
                      const PairQuadratureRules& rules, bool wantV, bool wantK,
                      bool wantKp, bool wantW) {
  if ((wantK || wantKp || wantW) && !primal)
    throw std::invalid_argument("assembly: primal space required");
  if ((wantV || wantK || wantKp) && !flux)
    throw std::invalid_argument("assembly: flux space required");
  if (primal && primal->family() != Family::P1Continuous)
    throw std::invalid_argument("assembly: primal space must be P1-continuous");
  const SweepContext c =
      make_context(mesh, primal, flux, rules, wantV, wantK, wantKp, wantW);
  const long np = primal ? primal->dof_count() : 0;
  const long nf = flux ? flux->dof_count() : 0;
  SweepResult out;
  if (wantV) out.V = Eigen::MatrixXd::Zero(nf, nf);
  if (wantK) out.K = Eigen::MatrixXd::Zero(nf, np);
  if (wantKp) out.Kp = Eigen::MatrixXd::Zero(np, nf);
  if (wantW) out.W = Eigen::MatrixXd::Zero(np, np);
  auto slot = [&](SweepResult& r, Eigen::MatrixXd*& v, Eigen::MatrixXd*& k,
                  Eigen::MatrixXd*& kp, Eigen::MatrixXd*& w) {
    v = wantV ? &r.V : nullptr;
    k = wantK ? &r.K : nullptr;
    kp = wantKp ? &r.Kp : nullptr;
    w = wantW ? &r.W : nullptr;
  };
  int nthreads = assembly_thread_count();
  if (nthreads > c.F) nthreads = static_cast<int>(c.F);
  if (nthreads <= 1) {
    Eigen::MatrixXd *v, *k, *kp, *w;
    slot(out, v, k, kp, w);
    sweep_range(c, 0, c.F, v, k, kp, w);
    return out;
  }
  std::vector<SweepResult> partial(static_cast<size_t>(nthreads));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) {
    SweepResult& r = partial[static_cast<size_t>(t)];
    if (wantV) r.V = Eigen::MatrixXd::Zero(nf, nf);
    if (wantK) r.K = Eigen::MatrixXd::Zero(nf, np);
    if (wantKp) r.Kp = Eigen::MatrixXd::Zero(np, nf);
    if (wantW) r.W = Eigen::MatrixXd::Zero(np, np);
    const long a = c.F * t / nthreads;
    const long b = c.F * (t + 1) / nthreads;
    pool.emplace_back([&c, &r, a, b, &slot]() {
      Eigen::MatrixXd *v, *k, *kp, *w;
      slot(r, v, k, kp, w);
      sweep_range(c, a, b, v, k, kp, w);
    });
  }
  for (auto& th : pool) th.join();
  for (int t = 0; t < nthreads; ++t) {  // fixed reduction order
    if (wantV) out.V += partial[static_cast<size_t>(t)].V;
    if (wantK) out.K += partial[static_cast<size_t>(t)].K;
    if (wantKp) out.Kp += partial[static_cast<size_t>(t)].Kp;
    if (wantW) out.W += partial[static_cast<size_t>(t)].W;
  }
  return out;
}

void check_same_mesh(const FunctionSpace& a, const FunctionSpace& b) {
  if (&a.mesh() != &b.mesh())
    throw std::invalid_argument("assembly: spaces live on different meshes");
}

bool flux_type(const FunctionSpace& s) {
  return s.family() == Family::P0Discontinuous ||
         s.family() == Family::P1Continuous ||
         s.family() == Family::P1Discontinuous;
}

}  // namespace

BoundaryOperators assemble_operators(const FunctionSpace& primal,
                                     const FunctionSpace& flux,
                                     const PairQuadratureRules& rules) {
  check_same_mesh(primal, flux);
  SweepResult r =
      run_sweep(primal.mesh(), &primal, &flux, rules, true, true, true, true);
  BoundaryOperators ops;
  ops.primal = &primal;
  ops.flux = &flux;
  ops.V = std::move(r.V);
  ops.K = std::move(r.K);
  ops.Kp = std::move(r.Kp);
  ops.W = std::move(r.W);
  return ops;
}

OperatorMatrix assemble_single_layer(const FunctionSpace& test,
                                     const FunctionSpace& trial,
                                     const PairQuadratureRules& rules) {
  check_same_mesh(test, trial);
  if (!flux_type(trial) || test.family() != trial.family())
    throw std::invalid_argument(
        "single layer: test and trial must be the same flux-type space");
  SweepResult r = run_sweep(test.mesh(), nullptr, &trial, rules, true, false,
                            false, false);
  return {OperatorKind::SingleLayer, &test, &trial, std::move(r.V)};
}

OperatorMatrix assemble_double_layer(const FunctionSpace& test,
                                     const FunctionSpace& trial,
                                     const PairQuadratureRules& rules) {
  check_same_mesh(test, trial);
  if (trial.family() != Family::P1Continuous)
    throw std::invalid_argument("double layer: trial must be P1-continuous");
  SweepResult r = run_sweep(test.mesh(), &trial, &test, rules, false, true,
                            false, false);
  return {OperatorKind::DoubleLayer, &test, &trial, std::move(r.K)};
}

OperatorMatrix assemble_adjoint_double_layer(const FunctionSpace& test,
                                             const FunctionSpace& trial,
                                             const PairQuadratureRules& rules) {
  check_same_mesh(test, trial);
  if (test.family() != Family::P1Continuous || !flux_type(trial))
    throw std::invalid_argument(
        "adjoint double layer: test must be P1-continuous, trial flux-type");
  SweepResult r = run_sweep(test.mesh(), &test, &trial, rules, false, false,
                            true, false);
  return {OperatorKind::AdjointDoubleLayer, &test, &trial, std::move(r.Kp)};
}

OperatorMatrix assemble_hypersingular(const FunctionSpace& test,
                                      const FunctionSpace& trial,
                                      const PairQuadratureRules& rules) {
  check_same_mesh(test, trial);
  if (test.family() != Family::P1Continuous ||
      trial.family() != Family::P1Continuous)
    throw std::invalid_argument("hypersingular: both spaces must be P1-continuous");
  SweepResult r = run_sweep(test.mesh(), &test, nullptr, rules, false, false,
                            false, true);
  return {OperatorKind::Hypersingular, &test, &trial, std::move(r.W)};
}

InteriorEvaluation evaluate_interior(const FunctionSpace& primal,
                                     const FunctionSpace& flux,
                                     const Eigen::VectorXd& u_coeffs,
                                     const Eigen::VectorXd& lambda_coeffs,
                                     const std::vector<Eigen::Vector3d>& points,
                                     int order) {
  check_same_mesh(primal, flux);
  if (primal.family() != Family::P1Continuous)
    throw std::invalid_argument("evaluate_interior: primal must be P1-continuous");
  if (u_coeffs.size() != primal.dof_count() ||
      lambda_coeffs.size() != flux.dof_count())
    throw std::invalid_argument("evaluate_interior: coefficient length mismatch");
  const TriangleSurfaceMesh& mesh = primal.mesh();
  const long F = mesh.num_triangles();
  const TriangleRule rule = triangle_rule(order);
  const int nq = static_cast<int>(rule.weights.size());
  const bool p0 = flux.family() == Family::P0Discontinuous;
  // trace values at the quadrature points
  std::vector<double> P(static_cast<size_t>(F) * nq * 3);
  std::vector<double> Wts(static_cast<size_t>(F) * nq);
  std::vector<double> uq(static_cast<size_t>(F) * nq), lq(static_cast<size_t>(F) * nq);
  for (long f = 0; f < F; ++f) {
    for (int q = 0; q < nq; ++q) {
      Eigen::Vector3d p = Eigen::Vector3d::Zero();
      double uv = 0.0, lv = 0.0;
      for (int k = 0; k < 3; ++k) {
        p += rule.points(q, k) * mesh.corner(f, k);
        uv += rule.points(q, k) * u_coeffs[primal.dof(f, k)];
        if (!p0) lv += rule.points(q, k) * lambda_coeffs[flux.dof(f, k)];
      }
      if (p0) lv = lambda_coeffs[f];
      for (int d = 0; d < 3; ++d) P[(f * nq + q) * 3 + d] = p[d];
      Wts[f * nq + q] = rule.weights[q] * mesh.jacobian(f);
      uq[f * nq + q] = uv;
      lq[f * nq + q] = lv;
    }
  }
  const double clearance = 0.5 * mesh_size(mesh);
  InteriorEvaluation out;
  out.values.reserve(points.size());
  out.proximity_warning.reserve(points.size());
  for (const Eigen::Vector3d& p : points) {
    double acc = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (long f = 0; f < F; ++f) {
      const Eigen::Vector3d n = mesh.normal(f);
      for (int q = 0; q < nq; ++q) {
        const double d0 = p[0] - P[(f * nq + q) * 3];
        const double d1 = p[1] - P[(f * nq + q) * 3 + 1];
        const double d2 = p[2] - P[(f * nq + q) * 3 + 2];
        const double r2 = d0 * d0 + d1 * d1 + d2 * d2;
        const double r = std::sqrt(r2);
        if (r < rmin) rmin = r;
        const double G = 1.0 / (kFourPi * r);
        const double kk = (d0 * n[0] + d1 * n[1] + d2 * n[2]) / (kFourPi * r2 * r);
        acc += Wts[f * nq + q] * (G * lq[f * nq + q] - kk * uq[f * nq + q]);
      }
    }
    out.values.push_back(acc);
    out.proximity_warning.push_back(rmin < clearance);
  }
  return out;
}

void save_operator(const OperatorMatrix& op, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_operator: cannot open " + path);
  f.write("BOP1", 4);
  const std::int32_t kind = static_cast<std::int32_t>(op.kind);
  const std::int64_t rows = op.m.rows(), cols = op.m.cols();
  f.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (long i = 0; i < rows; ++i)
    f.write(reinterpret_cast<const char*>(op.m.row(i).eval().data()),
            static_cast<std::streamsize>(sizeof(double)) * cols);
  if (!f) throw std::runtime_error("save_operator: write failed for " + path);
}

OperatorMatrix load_operator(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_operator: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "BOP1", 4) != 0)
    throw std::runtime_error("load_operator: bad header in " + path);
  std::int32_t kind;
  std::int64_t rows, cols;
  f.read(reinterpret_cast<char*>(&kind), sizeof kind);
  f.read(reinterpret_cast<char*>(&rows), sizeof rows);
  f.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!f || kind < 0 || kind > 3 || rows < 0 || cols < 0)
    throw std::runtime_error("load_operator: bad header in " + path);
  OperatorMatrix op;
  op.kind = static_cast<OperatorKind>(kind);
  op.m.resize(rows, cols);
  std::vector<double> row(static_cast<size_t>(cols));
  for (long i = 0; i < rows; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(sizeof(double)) * cols);
    if (!f) throw std::runtime_error("load_operator: truncated file " + path);
    for (long j = 0; j < cols; ++j) op.m(i, j) = row[static_cast<size_t>(j)];
  }
  return op;
}

}  // namespace bem
