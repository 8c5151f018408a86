#include "bem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bem {

const char* pair_class_name(PairClass c) {
  switch (c) {
    case PairClass::Disjoint: return "disjoint";
    case PairClass::Vertex: return "vertex";
    case PairClass::Edge: return "edge";
    case PairClass::Coincident: return "coincident";
  }
  return "?";
}

namespace {

// Gauss-Legendre on [0,1]; Newton on Legendre polynomials.
void gauss01(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // initial guess (Chebyshev), then Newton on P_n
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[n - 1 - i] = 0.5 * (t + 1.0);
    w[n - 1 - i] = 0.5 * 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

TriangleRule triangle_rule(int order) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("triangle_rule: order must be in [1, 20]");
  TriangleRule rule;
  if (order == 1) {
    rule.points.resize(1, 3);
    rule.points << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    rule.weights = Eigen::VectorXd::Constant(1, 0.5);
    rule.degree = 1;
    return rule;
  }
  if (order == 2) {
    rule.points.resize(3, 3);
    rule.points << 4, 1, 1, 1, 4, 1, 1, 1, 4;
    rule.points /= 6.0;
    rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
    rule.degree = 2;
    return rule;
  }
  if (order <= 4) {
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    rule.points.resize(6, 3);
    rule.weights.resize(6);
    int r = 0;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      rule.points.row(r) << b, a, a;
      rule.weights[r++] = 0.5 * w;
      rule.points.row(r) << a, b, a;
      rule.weights[r++] = 0.5 * w;
      rule.points.row(r) << a, a, b;
      rule.weights[r++] = 0.5 * w;
    }
    rule.degree = 4;
    return rule;
  }
  if (order == 5) {
    const double s15 = std::sqrt(15.0);
    rule.points.resize(7, 3);
    rule.weights.resize(7);
    rule.points.row(0) << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    rule.weights[0] = 0.5 * 9.0 / 40.0;
    int r = 1;
    for (double sgn : {+1.0, -1.0}) {
      const double b = (6.0 + sgn * s15) / 21.0;
      const double a = 1.0 - 2.0 * b;
      const double w = 0.5 * (155.0 + sgn * s15) / 1200.0;
      rule.points.row(r) << a, b, b;
      rule.weights[r++] = w;
      rule.points.row(r) << b, a, b;
      rule.weights[r++] = w;
      rule.points.row(r) << b, b, a;
      rule.weights[r++] = w;
    }
    rule.degree = 5;
    return rule;
  }
  // collapsed tensor Gauss: exact to the requested degree
  const int ns = (order + 3) / 2;
  Eigen::VectorXd xs, ws;
  gauss01(ns, xs, ws);
  rule.points.resize(ns * ns, 3);
  rule.weights.resize(ns * ns);
  int r = 0;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ns; ++j) {
      const double x = xs[i];
      const double y = xs[j] * (1.0 - xs[i]);
      rule.points.row(r) << 1.0 - x - y, x, y;
      rule.weights[r++] = ws[i] * ws[j] * (1.0 - xs[i]);
    }
  }
  rule.degree = order;
  return rule;
}

namespace {

// Sauter simplex (x1,x2) with 0<=x2<=x1<=1 -> barycentric (1-x1, x1-x2, x2).
inline Eigen::Vector3d simplex_to_bary(double x1, double x2) {
  return {1.0 - x1, x1 - x2, x2};
}

struct PairRuleBuilder {
  std::vector<Eigen::Vector3d> ba, bb;
  std::vector<double> w;
  void emit(double xa1, double xa2, double xb1, double xb2, double wt) {
    ba.push_back(simplex_to_bary(xa1, xa2));
    bb.push_back(simplex_to_bary(xb1, xb2));
    w.push_back(wt);
  }
  PairRule finish(PairClass cls, int order) {
    PairRule rule;
    rule.cls = cls;
    rule.order = order;
    const long n = static_cast<long>(w.size());
    rule.bary_a.resize(n, 3);
    rule.bary_b.resize(n, 3);
    rule.weights.resize(n);
    for (long i = 0; i < n; ++i) {
      rule.bary_a.row(i) = ba[static_cast<size_t>(i)];
      rule.bary_b.row(i) = bb[static_cast<size_t>(i)];
      rule.weights[i] = w[static_cast<size_t>(i)];
    }
    return rule;
  }
};

}  // namespace

PairRule singular_pair_rule(PairClass cls, int order) {
  if (cls == PairClass::Disjoint)
    throw std::invalid_argument("singular_pair_rule: class must be singular");
  if (order < 1 || order > 20)
    throw std::invalid_argument("singular_pair_rule: order must be in [1, 20]");
  Eigen::VectorXd g, gw;
  gauss01(order, g, gw);
  PairRuleBuilder b;
  // loop over the 4D tensor Gauss grid (xi, e1, e2, e3)
  for (int i0 = 0; i0 < order; ++i0)
    for (int i1 = 0; i1 < order; ++i1)
      for (int i2 = 0; i2 < order; ++i2)
        for (int i3 = 0; i3 < order; ++i3) {
          const double xi = g[i0], e1 = g[i1], e2 = g[i2], e3 = g[i3];
          const double wt4 = gw[i0] * gw[i1] * gw[i2] * gw[i3];
          if (cls == PairClass::Coincident) {
            const double base = wt4 * xi * (1.0 - xi) * (1.0 - xi) * e2;
            const double y1 = (1.0 - xi) * e2;
            const double y2 = (1.0 - xi) * e2 * e3;
            const double regions[3][3] = {
                {xi, xi * e1, 0.0},
                {xi * e1, xi, xi * (1.0 - e1)},
                {-xi * e1, xi * (1.0 - e1), xi}};
            for (const auto& rg : regions) {
              const double a1 = y1 + rg[2], a2 = y2;
              const double b1 = a1 + rg[0], b2 = a2 + rg[1];
              b.emit(b1, b2, a1, a2, base);  // (y+z, y)
              b.emit(a1, a2, b1, b2, base);  // swapped
            }
          } else if (cls == PairClass::Edge) {
            // decoupled edge coords: x1 = x2 + s(1-x2), y1 = y2 + t(1-y2),
            // d = s - t; six sectors from three (d,x2,y2) splits times sign
            const double sectors[3][3] = {{xi, xi * e1, xi * e2},
                                          {xi * e2, xi, xi * e1},
                                          {xi * e2, xi * e1, xi}};
            for (double sgn : {+1.0, -1.0}) {
              for (const auto& sc : sectors) {
                const double dd = sc[0], x2 = sc[1], y2 = sc[2];
                const double d = sgn * dd;
                const double t =
                    d >= 0.0 ? (1.0 - d) * e3 : -d + (1.0 + d) * e3;
                const double s = t + d;
                const double wt =
                    wt4 * xi * xi * (1.0 - dd) * (1.0 - x2) * (1.0 - y2);
                b.emit(x2 + s * (1.0 - x2), x2, y2 + t * (1.0 - y2), y2, wt);
              }
            }
          } else {  // Vertex
            const double base = wt4 * xi * xi * xi * e2;
            b.emit(xi, xi * e1, xi * e2, xi * e2 * e3, base);
            b.emit(xi * e2, xi * e2 * e3, xi, xi * e1, base);
          }
        }
  return b.finish(cls, order);
}

PairOrder classify_pair(const TriangleSurfaceMesh& mesh, long ta, long tb) {
  PairOrder po;
  const auto& T = mesh.triangles();
  const int A[3] = {T(ta, 0), T(ta, 1), T(ta, 2)};
  const int B[3] = {T(tb, 0), T(tb, 1), T(tb, 2)};
  auto in_b = [&](int v) { return v == B[0] || v == B[1] || v == B[2]; };
  int shared = 0;
  for (int v : A) shared += in_b(v) ? 1 : 0;
  po.order_a = {A[0], A[1], A[2]};
  po.order_b = {B[0], B[1], B[2]};
  if (shared == 3) {
    po.cls = PairClass::Coincident;
    po.order_b = po.order_a;
  } else if (shared == 2) {
    po.cls = PairClass::Edge;
    // directed edge (g0,g1) as it appears in ta; both triangles list it first
    int g0 = -1, g1 = -1;
    for (int r = 0; r < 3; ++r) {
      if (in_b(A[r]) && in_b(A[(r + 1) % 3])) {
        g0 = A[r];
        g1 = A[(r + 1) % 3];
        break;
      }
    }
    int offa = -1;
    for (int v : A)
      if (v != g0 && v != g1) offa = v;
    int offb = -1;
    for (int v : B)
      if (v != g0 && v != g1) offb = v;
    po.order_a = {g0, g1, offa};
    po.order_b = {g0, g1, offb};
  } else if (shared == 1) {
    po.cls = PairClass::Vertex;
    int s = -1;
    for (int v : A)
      if (in_b(v)) s = v;
    int ra = 0, rb = 0;
    while (A[ra] != s) ++ra;
    while (B[rb] != s) ++rb;
    po.order_a = {A[ra], A[(ra + 1) % 3], A[(ra + 2) % 3]};
    po.order_b = {B[rb], B[(rb + 1) % 3], B[(rb + 2) % 3]};
  } else {
    po.cls = PairClass::Disjoint;
  }
  return po;
}

double integrate_pair(const PairKernel& kernel, const TriangleSurfaceMesh& mesh,
                      long tri_a, long tri_b, const PairQuadratureRules& rules) {
  const PairOrder po = classify_pair(mesh, tri_a, tri_b);
  const double scale = mesh.jacobian(tri_a) * mesh.jacobian(tri_b);
  double acc = 0.0;
  if (po.cls == PairClass::Disjoint) {
    const double cd = (mesh.centroid(tri_a) - mesh.centroid(tri_b)).norm();
    const double dm = std::max(mesh.diameter(tri_a), mesh.diameter(tri_b));
    const int ord = cd < 2.0 * dm ? rules.near_order : rules.regular_order;
    const TriangleRule tr = triangle_rule(ord);
    for (long i = 0; i < tr.weights.size(); ++i) {
      Eigen::Vector3d x = Eigen::Vector3d::Zero();
      for (int k = 0; k < 3; ++k) x += tr.points(i, k) * mesh.corner(tri_a, k);
      for (long j = 0; j < tr.weights.size(); ++j) {
        Eigen::Vector3d y = Eigen::Vector3d::Zero();
        for (int k = 0; k < 3; ++k)
          y += tr.points(j, k) * mesh.corner(tri_b, k);
        const double kv = kernel(x, y);
        if (!std::isfinite(kv))
          throw std::runtime_error(
              "integrate_pair: non-finite kernel on a disjoint pair "
              "(misclassified pair)");
        acc += tr.weights[i] * tr.weights[j] * kv;
      }
    }
    return scale * acc;
  }
  const PairRule pr = singular_pair_rule(po.cls, rules.singular_order);
  for (long n = 0; n < pr.weights.size(); ++n) {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Vector3d y = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
      x += pr.bary_a(n, k) * mesh.vertex(po.order_a[static_cast<size_t>(k)]);
      y += pr.bary_b(n, k) * mesh.vertex(po.order_b[static_cast<size_t>(k)]);
    }
    const double kv = kernel(x, y);
    if (!std::isfinite(kv))
      throw std::runtime_error(
          "integrate_pair: non-finite kernel at a transformed node "
          "(misclassified pair)");
    acc += pr.weights[n] * kv;
  }
  return scale * acc;
}

}  // namespace bem
