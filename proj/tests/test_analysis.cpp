#include <cmath>
#include <stdexcept>

#include "bem/analysis.hpp"
#include "doctest.h"

using namespace bem;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

struct Setup {
  TriangleSurfaceMesh mesh;
  FunctionSpace primal;
  FunctionSpace flux;
  BoundaryOperators ops;

  explicit Setup(int level, Region label = Region::Dirichlet)
      : mesh(tag_regions(make_icosphere(level), WholeBoundary{label})),
        primal(mesh, Family::P1Continuous),
        flux(mesh, Family::P0Discontinuous),
        ops(assemble_operators(primal, flux)) {}
};

VectorXd wavy(long n, double phase) {
  VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = std::sin(0.7 * double(i) + phase);
  return v;
}

}  // namespace

TEST_CASE("trace norms are homogeneous seminorm-like functionals") {
  const Setup s(1);
  const VectorXd v = wavy(s.primal.dof_count(), 0.2);
  const VectorXd w = wavy(s.primal.dof_count(), 1.5);
  const VectorXd mu = wavy(s.flux.dof_count(), 0.9);
  const VectorXd nu = wavy(s.flux.dof_count(), 2.4);

  CHECK(half_norm(s.ops, 3.0 * v) ==
        doctest::Approx(3.0 * half_norm(s.ops, v)).epsilon(1e-10));
  CHECK(dual_norm(s.ops, 3.0 * mu) ==
        doctest::Approx(3.0 * dual_norm(s.ops, mu)).epsilon(1e-10));
  CHECK(half_norm(s.ops, v + w) <=
        half_norm(s.ops, v) + half_norm(s.ops, w) + 1e-12);
  CHECK(dual_norm(s.ops, mu + nu) <=
        dual_norm(s.ops, mu) + dual_norm(s.ops, nu) + 1e-12);
  CHECK(half_norm(s.ops, VectorXd::Zero(v.size())) == 0.0);
  CHECK(dual_norm(s.ops, VectorXd::Zero(mu.size())) == 0.0);
}

TEST_CASE("half norm of a constant is |c| sqrt(area)") {
  const Setup s(1);
  const double area = s.mesh.total_area();
  const VectorXd c = VectorXd::Constant(s.primal.dof_count(), -2.5);
  CHECK(half_norm(s.ops, c) ==
        doctest::Approx(2.5 * std::sqrt(area)).epsilon(1e-10));
}

TEST_CASE("dual norm of a constant approaches sqrt(4 pi)") {
  // <V 1, 1> -> |S^2| as the mesh resolves, since constants are a fixed point
  // of the single layer on the unit sphere
  const Setup s(2);
  const VectorXd one = VectorXd::Ones(s.flux.dof_count());
  CHECK(dual_norm(s.ops, one) ==
        doctest::Approx(std::sqrt(4.0 * M_PI)).epsilon(0.02));
}

TEST_CASE("b norm components match a hand-assembled evaluation") {
  const Setup s(1);
  PenaltyParameters params;
  params.beta = 0.2;
  params.law = ScalingLaw::Constant;
  const ResolvedPenalty pen = params.resolve(mesh_size(s.mesh));

  const VectorXd eu = wavy(s.primal.dof_count(), 0.4);
  const VectorXd el = wavy(s.flux.dof_count(), 1.1);
  const ErrorBreakdown b = b_norm(s.ops, BCKind::Dirichlet, pen, eu, el);

  const MatrixXd Mpp = MatrixXd(assemble_mass(s.primal, s.primal));
  const double area = s.mesh.total_area();
  const double mean = VectorXd::Ones(eu.size()).dot(Mpp * eu) / area;
  const double half =
      std::sqrt(std::max(eu.dot(s.ops.W * eu), 0.0) + mean * mean * area);
  const double dual = std::sqrt(std::max(el.dot(s.ops.V * el), 0.0));
  const double l2 = std::sqrt(pen.beta_D) * std::sqrt(eu.dot(Mpp * eu));

  CHECK(b.half_norm_primal == doctest::Approx(half).epsilon(1e-12));
  CHECK(b.dual_norm_flux == doctest::Approx(dual).epsilon(1e-12));
  REQUIRE(b.l2_region_terms.size() == 1);
  CHECK(b.l2_region_terms[0].label == "primal");
  CHECK(b.l2_region_terms[0].value == doctest::Approx(l2).epsilon(1e-12));
  CHECK(b.b_norm_total ==
        doctest::Approx(half + dual + l2).epsilon(1e-12));
  CHECK(b.b_norm_total >= b.half_norm_primal + b.dual_norm_flux);

  CHECK_THROWS_AS(b_norm(s.ops, BCKind::StdDirichlet, pen, eu, el),
                  std::invalid_argument);
  CHECK_THROWS_AS(b_norm(s.ops, BCKind::StdRobin, pen, eu, el),
                  std::invalid_argument);
}

TEST_CASE("Robin b norm recovers the Dirichlet weights as eps vanishes") {
  const Setup s(1, Region::Robin);
  const VectorXd eu = wavy(s.primal.dof_count(), 0.4);
  const VectorXd el = wavy(s.flux.dof_count(), 1.1);

  PenaltyParameters params;
  params.beta = 0.2;
  params.law = ScalingLaw::Constant;
  params.eps = 1e-12;
  const ResolvedPenalty pen = params.resolve(mesh_size(s.mesh));
  const ErrorBreakdown rb = b_norm(s.ops, BCKind::Robin, pen, eu, el);
  REQUIRE(rb.l2_region_terms.size() == 2);
  CHECK(rb.l2_region_terms[0].label == "primal");
  CHECK(rb.l2_region_terms[1].label == "flux");

  const ErrorBreakdown db = b_norm(s.ops, BCKind::Dirichlet, pen, eu, el);
  CHECK(rb.l2_region_terms[0].value ==
        doctest::Approx(db.l2_region_terms[0].value).epsilon(1e-8));
  // the flux weight sqrt(eps * omega) dies with eps
  CHECK(rb.l2_region_terms[1].value < 1e-4 * rb.l2_region_terms[0].value);
}

TEST_CASE("mixed b norm labels its region-restricted terms") {
  const TriangleSurfaceMesh mesh = tag_regions(make_icosphere(1), HalfspaceX{});
  const FunctionSpace primal(mesh, Family::P1Continuous);
  const FunctionSpace flux(mesh, Family::P0Discontinuous);
  const BoundaryOperators ops = assemble_operators(primal, flux);
  PenaltyParameters params;
  params.beta = 0.01;
  const ResolvedPenalty pen = params.resolve(mesh_size(mesh));

  const VectorXd eu = wavy(primal.dof_count(), 0.4);
  const VectorXd el = wavy(flux.dof_count(), 1.1);
  const ErrorBreakdown b = b_norm(ops, BCKind::Mixed, pen, eu, el);
  REQUIRE(b.l2_region_terms.size() == 2);
  CHECK(b.l2_region_terms[0].label == "primal:dirichlet");
  CHECK(b.l2_region_terms[1].label == "flux:neumann");

  const MatrixXd MD =
      MatrixXd(assemble_mass(primal, primal, {{Region::Dirichlet}}));
  const double expect = std::sqrt(pen.beta_D) * std::sqrt(eu.dot(MD * eu));
  CHECK(b.l2_region_terms[0].value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("eoc recovers exact power laws") {
  std::vector<std::pair<double, double>> quad, sesqui;
  for (double h : {0.8, 0.4, 0.2, 0.1}) {
    quad.emplace_back(h, 3.0 * h * h);
    sesqui.emplace_back(h, 0.7 * std::pow(h, 1.5));
  }
  const EocResult q = eoc(quad);
  REQUIRE(q.successive.size() == 3);
  for (double s : q.successive) CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(q.least_squares == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eoc(sesqui).least_squares == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_THROWS_AS(eoc({{0.4, 1.0}, {0.2, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({{0.4, 1.0}, {0.2, 0.5}, {0.2, 0.2}}),
                  std::invalid_argument);  // h must strictly decrease
  CHECK_THROWS_AS(eoc({{0.4, 1.0}, {0.2, 0.0}, {0.1, 0.2}}),
                  std::invalid_argument);  // errors must stay positive
}

TEST_CASE("calderon residual vanishes on zero data and decays on traces") {
  const Setup s1(1);
  CHECK(calderon_residual(s1.ops, VectorXd::Zero(s1.primal.dof_count()),
                          VectorXd::Zero(s1.flux.dof_count())) == 0.0);

  const ManufacturedSolution ms = manufactured(BCKind::Dirichlet);
  const VectorXd u1 = interpolate(s1.primal, ms.g_D);
  const VectorXd l1 = interpolate(s1.flux, ms.g_N);
  const double r1 = calderon_residual(s1.ops, u1, l1);
  CHECK(r1 > 0.0);

  const Setup s2(2);
  const VectorXd u2 = interpolate(s2.primal, ms.g_D);
  const VectorXd l2 = interpolate(s2.flux, ms.g_N);
  const double r2 = calderon_residual(s2.ops, u2, l2);
  CHECK(r2 < r1);
}

TEST_CASE("interior error against the exact solution") {
  const Setup s(1);
  const std::vector<Vector3d>& pts = standard_interior_points();
  REQUIRE(pts.size() == 3);
  for (const Vector3d& p : pts) CHECK(p.norm() < 1.0);
  CHECK(pts[1].norm() == 0.0);

  // zero trace pair against the zero solution: no error anywhere
  const std::vector<InteriorError> z = interior_error(
      s.primal, s.flux, VectorXd::Zero(s.primal.dof_count()),
      VectorXd::Zero(s.flux.dof_count()), [](const Vector3d&) { return 0.0; },
      pts);
  REQUIRE(z.size() == 3);
  for (const InteriorError& e : z) {
    CHECK(e.error == 0.0);
    CHECK_FALSE(e.proximity_warning);
  }

  // proximity warnings propagate from the evaluator
  const std::vector<InteriorError> near = interior_error(
      s.primal, s.flux, VectorXd::Zero(s.primal.dof_count()),
      VectorXd::Zero(s.flux.dof_count()), [](const Vector3d&) { return 0.0; },
      {Vector3d(0.98, 0, 0)});
  CHECK(near[0].proximity_warning);

  // the constant solution is reproduced to discretisation accuracy
  const std::vector<InteriorError> c = interior_error(
      s.primal, s.flux, VectorXd::Ones(s.primal.dof_count()),
      VectorXd::Zero(s.flux.dof_count()), [](const Vector3d&) { return 1.0; },
      {Vector3d(0, 0, 0)});
  CHECK(c[0].error < 1e-2);
}
