#include "ddlab/assembly.hpp"

#include "ddlab/elements.hpp"
#include "ddlab/factorization.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

namespace {

const double kPi = 3.14159265358979323846;

Vec2 u_trig(const Vec2& x) {
  return {std::sin(kPi * x.x()) * std::sin(kPi * x.y()),
          std::cos(kPi * x.x()) * std::cos(kPi * x.y())};
}
double p_linear(const Vec2& x) { return x.x() + x.y() - 1.0; }
Vec2 f_trig(const Vec2& x) { return (2.0 * kPi * kPi * u_trig(x) + Vec2(1.0, 1.0)).eval(); }

/// dof vector of the hdG interpolant of a smooth field (BDM moments,
/// facet-mean multipliers, zero pressure).
Eigen::VectorXd hdg_interpolant(const Space& space, const VectorField& u) {
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(space.total_dofs);
  const EdgeRule& rule = edge_rule(9);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facets[f];
    Vec2 p0 = mesh.vertices[fc.v0], p1 = mesh.vertices[fc.v1];
    const double len = (p1 - p0).norm();
    const Vec2 n = mesh.facet_normal(f), t = mesh.facet_tangent(f);
    double m0 = 0, m1 = 0, mt = 0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      const Vec2 uv = u(p0 + s * (p1 - p0));
      m0 += rule.weights[q] * len * uv.dot(n);
      m1 += rule.weights[q] * len * uv.dot(n) * (2 * s - 1);
      mt += rule.weights[q] * uv.dot(t);
    }
    x(space.bdm_dof(f, 0)) = m0;
    x(space.bdm_dof(f, 1)) = m1;
    x(space.multiplier_dof(f)) = mt;
  }
  return x;
}

double solve_hdg_error(int res, const Problem& prob, const VectorField& u_exact,
                       const ScalarField& p_exact) {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), res);
  Space space = build_space(mesh, Scheme::HDG, 1);
  LinearSystem sys = assemble_hdg(space, prob);
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  return l2_error(space, sys, sol, u_exact, p_exact).velocity;
}

}  // namespace

TEST_CASE("constants lie in the kernel of the Stokes hdG Neumann operator") {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::HDG, 1);
  StokesProblem stokes;
  stokes.viscosity = 2.0;
  FacetConditionMap none;
  LinearSystem sys = assemble(space, Problem(stokes), none, {}, {});
  auto c = [](const Vec2&) { return Vec2(0.7, -1.3); };
  Eigen::VectorXd x = hdg_interpolant(space, c);
  const double scale = sys.A.mat.coeffs().abs().maxCoeff();
  CHECK((sys.A.mat * x).cwiseAbs().maxCoeff() < 1e-12 * scale * x.cwiseAbs().maxCoeff());
}

TEST_CASE("rigid body motions lie in the kernel of the elasticity hdG Neumann operator") {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::HDG, 1);
  ElasticityProblem el;
  el.materials[0] = Material{100.0, 0.3};
  FacetConditionMap none;
  LinearSystem sys = assemble(space, Problem(el), none, {}, {});
  const double scale = sys.A.mat.coeffs().abs().maxCoeff();
  // translations and the rotation (-y, x)
  for (auto rb : {VectorField([](const Vec2&) { return Vec2(1.0, 0.0); }),
                  VectorField([](const Vec2&) { return Vec2(0.0, 1.0); }),
                  VectorField([](const Vec2& v) { return Vec2(-v.y(), v.x()); })}) {
    Eigen::VectorXd x = hdg_interpolant(space, rb);
    CHECK((sys.A.mat * x).cwiseAbs().maxCoeff() < 1e-11 * scale * x.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("linear Stokes solutions are reproduced exactly by hdG") {
  // divergence-free linear field, zero body force, exact pressure 0
  auto u = [](const Vec2& v) { return Vec2(2.0 * v.x() - v.y(), 3.0 * v.x() - 2.0 * v.y()); };
  auto p = [](const Vec2&) { return 0.0; };
  StokesProblem prob;
  prob.viscosity = 1.0;
  for (const char* tag : {"left", "right", "bottom", "top"})
    prob.bc.by_tag[tag] = BoundaryCondition::dirichlet(u);

  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::HDG, 1);
  LinearSystem sys = assemble_hdg(space, Problem(prob));
  CHECK(sys.A.blocks.augmented);
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  SolutionError err = l2_error(space, sys, sol, u, p);
  CHECK(err.velocity < 1e-10);
  CHECK(err.pressure < 1e-10);
}

TEST_CASE("linear elasticity solutions are reproduced exactly by hdG") {
  auto u = [](const Vec2& v) { return Vec2(v.x() + 2.0 * v.y(), 3.0 * v.x() - v.y()); };
  auto p = [](const Vec2&) { return 0.0; };  // div u = 0
  ElasticityProblem prob;
  prob.materials[0] = Material{50.0, 0.2};
  for (const char* tag : {"left", "right", "bottom", "top"})
    prob.bc.by_tag[tag] = BoundaryCondition::dirichlet(u);

  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::HDG, 1);
  LinearSystem sys = assemble_hdg(space, Problem(prob));
  CHECK_FALSE(sys.A.blocks.augmented);
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  SolutionError err = l2_error(space, sys, sol, u, p);
  CHECK(err.velocity < 1e-10);
  CHECK(err.pressure < 1e-10);
}

TEST_CASE("hdG velocity converges at second order on the trig solution") {
  StokesProblem prob;
  prob.viscosity = 1.0;
  prob.body_force = f_trig;
  for (const char* tag : {"left", "right", "bottom", "top"})
    prob.bc.by_tag[tag] = BoundaryCondition::dirichlet(u_trig);
  double e1 = solve_hdg_error(4, Problem(prob), u_trig, p_linear);
  double e2 = solve_hdg_error(8, Problem(prob), u_trig, p_linear);
  double e3 = solve_hdg_error(16, Problem(prob), u_trig, p_linear);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
  CHECK(std::log2(e1 / e2) > 1.7);
  CHECK(std::log2(e2 / e3) > 1.7);
}

TEST_CASE("doubling tau changes only facet-penalty entries") {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::HDG, 1);
  TestCase tc = canonical_test_case("cavity");
  AssemblyOptions o1, o2;
  o1.tau = 10.0;
  o2.tau = 20.0;
  Mesh cav = build_structured_mesh(tc.shape, 3);
  Space csp = build_space(cav, Scheme::HDG, 1);
  LinearSystem s1 = assemble_hdg(csp, tc.problem, o1);
  LinearSystem s2 = assemble_hdg(csp, tc.problem, o2);
  SparseMat diff = SparseMat(s2.A.mat - s1.A.mat);
  diff.prune(1e-14 * s1.A.mat.coeffs().abs().maxCoeff());
  CHECK(diff.nonZeros() > 0);
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMat::InnerIterator it(diff, k); it; ++it) {
      // pressure rows/columns never see the penalty
      CHECK_FALSE(csp.is_pressure_dof(it.row()));
      CHECK_FALSE(csp.is_pressure_dof(it.col()));
    }
}

TEST_CASE("hdG matrices are symmetric") {
  TestCase tc = canonical_test_case("cavity");
  Mesh mesh = build_structured_mesh(tc.shape, 4);
  Space space = build_space(mesh, Scheme::HDG, 1);
  LinearSystem sys = assemble_hdg(space, tc.problem);
  SparseMat diff = SparseMat(sys.A.mat - SparseMat(sys.A.mat.transpose()));
  CHECK(diff.coeffs().abs().maxCoeff() < 1e-12 * sys.A.mat.coeffs().abs().maxCoeff());
}

TEST_CASE("hdG rejects non-positive tau") {
  TestCase tc = canonical_test_case("cavity");
  Mesh mesh = build_structured_mesh(tc.shape, 2);
  Space space = build_space(mesh, Scheme::HDG, 1);
  AssemblyOptions opts;
  opts.tau = 0.0;
  CHECK_THROWS(assemble_hdg(space, tc.problem, opts));
}
