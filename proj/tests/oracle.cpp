#include "oracle.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

namespace {

// 8-point Gauss-Legendre on [0, 1]
const double kGx[8] = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
    0.40828267875217510,  0.59171732124782490, 0.7627662049581645,
    0.89833323870681336,  0.98014492824876814};
const double kGw[8] = {
    0.050614268145188130, 0.11119051722668724, 0.15685332293894364,
    0.18134189168918100,  0.18134189168918100, 0.15685332293894364,
    0.11119051722668724,  0.050614268145188130};

// integral of f over the flat triangle t (collapsed product rule; exact
// enough for the smooth outer integrand, refinement handles the rest)
double tri_quad(const Tri& t,
                const std::function<double(const Eigen::Vector3d&)>& f) {
  const Eigen::Vector3d e1 = t[1] - t[0], e2 = t[2] - t[0];
  const double jac = e1.cross(e2).norm();
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double u = kGx[i];
    for (int j = 0; j < 8; ++j) {
      const double v = kGx[j] * (1.0 - u);
      s += kGw[i] * kGw[j] * (1.0 - u) * f(t[0] + u * e1 + v * e2);
    }
  }
  return s * jac;
}

void split4(const Tri& t, Tri out[4]) {
  const Eigen::Vector3d m01 = 0.5 * (t[0] + t[1]);
  const Eigen::Vector3d m12 = 0.5 * (t[1] + t[2]);
  const Eigen::Vector3d m20 = 0.5 * (t[2] + t[0]);
  out[0] = {t[0], m01, m20};
  out[1] = {m01, t[1], m12};
  out[2] = {m20, m12, t[2]};
  out[3] = {m01, m12, m20};
}

// Richardson limit of the refinement sequence via iterated Aitken
double aitken_limit(std::vector<double> s) {
  while (s.size() >= 3) {
    std::vector<double> t;
    for (size_t i = 0; i + 2 < s.size(); ++i) {
      const double den = s[i + 2] - 2.0 * s[i + 1] + s[i];
      if (std::abs(den) < 1e-300)
        t.push_back(s[i + 2]);
      else
        t.push_back(s[i + 2] - (s[i + 2] - s[i + 1]) * (s[i + 2] - s[i + 1]) /
                                   den);
    }
    s = std::move(t);
  }
  return s.back();
}

double refine_integrate(
    const Tri& a, const std::function<double(const Eigen::Vector3d&)>& inner) {
  std::vector<double> seq;
  std::vector<Tri> cells = {a};
  for (int k = 0; k <= 5; ++k) {
    double s = 0.0;
    for (const Tri& c : cells) s += tri_quad(c, inner);
    seq.push_back(s);
    if (k < 5) {
      std::vector<Tri> next;
      next.reserve(cells.size() * 4);
      for (const Tri& c : cells) {
        Tri q[4];
        split4(c, q);
        next.insert(next.end(), {q[0], q[1], q[2], q[3]});
      }
      cells = std::move(next);
    }
  }
  return aitken_limit(seq);
}

}  // namespace

double potential_tri(const Eigen::Vector3d& p, const Tri& t) {
  const Eigen::Vector3d n = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
  const double h = (p - t[0]).dot(n);
  const Eigen::Vector3d rho = p - h * n;
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector3d a = t[e], b = t[(e + 1) % 3];
    const Eigen::Vector3d tv = (b - a).normalized();
    const Eigen::Vector3d m = tv.cross(n);
    const double d = (rho - a).dot(m);
    const double la = (rho - a).dot(tv);
    const double lb = (rho - b).dot(tv);
    const double Ra = (p - a).norm();
    const double Rb = (p - b).norm();
    const double R0sq = d * d + h * h;
    const double num = Rb + lb, den = Ra + la;
    double term = 0.0;
    if (num > 1e-300 && den > 1e-300) term = d * std::log(num / den);
    term -= std::abs(h) * (std::atan2(d * lb, R0sq + std::abs(h) * Rb) -
                           std::atan2(d * la, R0sq + std::abs(h) * Ra));
    total += term;
  }
  return total;
}

double solid_angle(const Eigen::Vector3d& p, const Tri& t) {
  const Eigen::Vector3d r1 = t[0] - p, r2 = t[1] - p, r3 = t[2] - p;
  const double n1 = r1.norm(), n2 = r2.norm(), n3 = r3.norm();
  const double num = r1.dot(r2.cross(r3));
  const double den = n1 * n2 * n3 + r1.dot(r2) * n3 + r1.dot(r3) * n2 +
                     r2.dot(r3) * n1;
  return 2.0 * std::atan2(num, den);
}

double galerkin_V(const Tri& a, const Tri& b) {
  const double fourpi = 4.0 * M_PI;
  return refine_integrate(a, [&](const Eigen::Vector3d& p) {
           return potential_tri(p, b);
         }) /
         fourpi;
}

double galerkin_K(const Tri& a, const Tri& b) {
  const double fourpi = 4.0 * M_PI;
  // int_b (x-y).n/|x-y|^3 dy = -solid_angle(x, b)
  return refine_integrate(a, [&](const Eigen::Vector3d& p) {
           return -solid_angle(p, b);
         }) /
         fourpi;
}

}  // namespace oracle
