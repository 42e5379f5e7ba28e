#include "ddlab/assembly.hpp"

#include "ddlab/factorization.hpp"
#include "ddlab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

namespace {

const double kPi = 3.14159265358979323846;

// divergence-free manufactured Stokes solution on the unit square
Vec2 u_trig(const Vec2& x) {
  return {std::sin(kPi * x.x()) * std::sin(kPi * x.y()),
          std::cos(kPi * x.x()) * std::cos(kPi * x.y())};
}
double p_linear(const Vec2& x) { return x.x() + x.y() - 1.0; }
Vec2 f_trig(const Vec2& x) { return (2.0 * kPi * kPi * u_trig(x) + Vec2(1.0, 1.0)).eval(); }

StokesProblem dirichlet_stokes(VectorField u, VectorField f) {
  StokesProblem prob;
  prob.viscosity = 1.0;
  prob.body_force = std::move(f);
  for (const char* tag : {"left", "right", "bottom", "top"})
    prob.bc.by_tag[tag] = BoundaryCondition::dirichlet(u);
  return prob;
}

double solve_velocity_error(int res, const StokesProblem& prob, const VectorField& u_exact,
                            const ScalarField& p_exact) {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), res);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  LinearSystem sys = assemble_taylor_hood(space, Problem(prob));
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  return l2_error(space, sys, sol, u_exact, p_exact).velocity;
}

}  // namespace

TEST_CASE("quadratic Stokes solutions are reproduced exactly by TH2") {
  auto u = [](const Vec2& x) { return Vec2(x.y() * x.y(), x.x() * x.x()); };
  auto p = [](const Vec2& x) { return x.x() + x.y() - 1.0; };
  auto f = [](const Vec2&) { return Vec2(-1.0, -1.0); };  // -lap u + grad p

  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  StokesProblem prob = dirichlet_stokes(u, f);
  LinearSystem sys = assemble_taylor_hood(space, Problem(prob));
  CHECK(sys.A.blocks.augmented);  // all-Dirichlet fixes pressure only up to a constant
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  SolutionError err = l2_error(space, sys, sol, u, p);
  CHECK(err.velocity < 1e-10);
  CHECK(err.pressure < 1e-9);
}

TEST_CASE("quadratic elasticity solutions are reproduced exactly by TH2") {
  // u quadratic, p = -lambda div u, f from the strong form
  const double young = 10.0, poisson = 0.3;
  auto [lambda, mu] = lame_parameters(young, poisson);
  auto u = [](const Vec2& x) { return Vec2(x.x() * x.x() + x.y(), x.x() * x.y() - 2.0 * x.x()); };
  // div u = 2x + x = 3x, eps(u) = [[2x, (1+y-2+... ]] worked out below
  auto p = [lambda](const Vec2& x) { return -lambda * 3.0 * x.x(); };
  // -2 mu div eps(u) + grad p = f with eps components:
  //   e_xx = 2x, e_yy = x, e_xy = (1 + y - 2)/2 + ... = (y - 1)/2 + x*0 ...
  // div eps = (d_x e_xx + d_y e_xy, d_x e_xy + d_y e_yy) = (2 + 1/2*0 ... )
  // computed symbolically: e_xy = 0.5*(1 + y - 2) = 0.5*(y - 1)
  //   => div eps = (2 + 0.5, 0 + 0) = (2.5, 0)
  auto f = [mu, lambda](const Vec2&) {
    return Vec2(-2.0 * mu * 2.5 - 3.0 * lambda, 0.0);
  };
  ElasticityProblem prob;
  prob.materials[0] = Material{young, poisson};
  prob.body_force = f;
  for (const char* tag : {"left", "right", "bottom", "top"})
    prob.bc.by_tag[tag] = BoundaryCondition::dirichlet(u);

  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  LinearSystem sys = assemble_taylor_hood(space, Problem(prob));
  CHECK_FALSE(sys.A.blocks.augmented);  // the 1/lambda term fixes the pressure
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  SolutionError err = l2_error(space, sys, sol, u, p);
  CHECK(err.velocity < 1e-9);
  CHECK(err.pressure / lambda < 1e-9);
}

TEST_CASE("TH2 velocity converges at third order on the trig solution") {
  StokesProblem prob = dirichlet_stokes(u_trig, f_trig);
  double e1 = solve_velocity_error(4, prob, u_trig, p_linear);
  double e2 = solve_velocity_error(8, prob, u_trig, p_linear);
  double e3 = solve_velocity_error(16, prob, u_trig, p_linear);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
  CHECK(std::log2(e1 / e2) > 2.7);
  CHECK(std::log2(e2 / e3) > 2.7);
}

TEST_CASE("constant velocity lies in the kernel of the b-form") {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 3);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  StokesProblem prob;  // no facet conditions at all: pure natural boundary
  prob.viscosity = 1.0;
  FacetConditionMap none;
  LinearSystem sys = assemble(space, Problem(prob), none, {}, {});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.size());
  for (int n = 0; n < space.velocity_dofs / 2; ++n) {
    x(2 * n) = 3.0;
    x(2 * n + 1) = -2.0;
  }
  Eigen::VectorXd r = sys.A.mat * x;
  CHECK(r.cwiseAbs().maxCoeff() < 1e-12 * sys.A.mat.coeffs().abs().maxCoeff());
}

TEST_CASE("assembled matrices are symmetric after constraint elimination") {
  for (const char* which : {"cavity", "l_shape"}) {
    Mesh mesh = which == std::string("cavity")
                    ? build_structured_mesh(DomainShape::unit_square(BoundaryRule::CavityLid), 4)
                    : build_structured_mesh(DomainShape::l_shape(BoundaryRule::LShapeClamp), 2);
    TestCase tc = canonical_test_case(which == std::string("cavity") ? "cavity"
                                                                     : "l_shape_elasticity");
    Space space = build_space(mesh, Scheme::TaylorHood, 2);
    LinearSystem sys = assemble_taylor_hood(space, tc.problem);
    SparseMat diff = SparseMat(sys.A.mat - SparseMat(sys.A.mat.transpose()));
    const double scale = sys.A.mat.coeffs().abs().maxCoeff();
    CHECK(diff.coeffs().abs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("velocity block acts symmetrically positive on random pairs") {
  TestCase tc = canonical_test_case("cavity");
  Mesh mesh = build_structured_mesh(tc.shape, 4);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  LinearSystem sys = assemble_taylor_hood(space, tc.problem);
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.size());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.size());
    x.head(space.velocity_dofs) = rng.vector(space.velocity_dofs);
    y.head(space.velocity_dofs) = rng.vector(space.velocity_dofs);
    const double axy = y.dot(sys.A.mat * x);
    const double ayx = x.dot(sys.A.mat * y);
    CHECK(axy == doctest::Approx(ayx).epsilon(1e-11));
    CHECK(x.dot(sys.A.mat * x) > 0);  // velocity block is definite
  }
}

TEST_CASE("constrained dofs solve to their boundary data exactly") {
  TestCase tc = canonical_test_case("cavity");
  Mesh mesh = build_structured_mesh(tc.shape, 4);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  LinearSystem sys = assemble_taylor_hood(space, tc.problem);
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  for (int d : sys.constrained) CHECK(sol(d) == doctest::Approx(sys.F(d)).epsilon(1e-12));
  // lid nodes carry u_x = 1
  bool saw_lid = false;
  for (int n = 0; n < space.velocity_dofs / 2; ++n) {
    if (space.velocity_layout.node_xy[n].y() > 1.0 - 1e-9) {
      saw_lid = true;
      CHECK(sol(2 * n) == doctest::Approx(1.0));
      CHECK(sol(2 * n + 1) == doctest::Approx(0.0));
    }
  }
  CHECK(saw_lid);
}

TEST_CASE("augmented systems have mean-zero pressure") {
  TestCase tc = canonical_test_case("cavity");
  Mesh mesh = build_structured_mesh(tc.shape, 4);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  LinearSystem sys = assemble_taylor_hood(space, tc.problem);
  REQUIRE(sys.A.blocks.augmented);
  Factorization lu(sys.A);
  Eigen::VectorXd sol = lu.solve(sys.F);
  // the augmentation row carries the pressure integral weights
  double mean = 0;
  for (SparseMat::InnerIterator it(sys.A.mat, sys.size() - 1); it; ++it)
    mean += it.value() * sol(it.col());
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("TVNF boundary: tangential constraint plus normal-flux load converge") {
  // exact solution satisfies u_t = 0 on top/bottom; g = sigma_nn there
  auto u = u_trig;
  auto p = p_linear;
  auto g = [&](const Vec2& x) {
    // n = (0,-1) on y=0 and (0,1) on y=1: sigma_nn = du_y/dy - p
    const double duy_dy = -kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
    return duy_dy - p(x);
  };
  StokesProblem prob;
  prob.viscosity = 1.0;
  prob.body_force = f_trig;
  prob.bc.by_tag["left"] = BoundaryCondition::dirichlet(u);
  prob.bc.by_tag["right"] = BoundaryCondition::dirichlet(u);
  prob.bc.by_tag["bottom"] = BoundaryCondition::flux(BCKind::TVNF, g);
  prob.bc.by_tag["top"] = BoundaryCondition::flux(BCKind::TVNF, g);

  double errs[3];
  int idx = 0;
  for (int res : {4, 8, 16}) {
    Mesh mesh = build_structured_mesh(DomainShape::unit_square(), res);
    Space space = build_space(mesh, Scheme::TaylorHood, 2);
    LinearSystem sys = assemble_taylor_hood(space, Problem(prob));
    CHECK_FALSE(sys.A.blocks.augmented);  // the free normal flux fixes the pressure
    CHECK(sys.has_rotation());            // tangential constraints rotate boundary nodes
    Factorization lu(sys.A);
    Eigen::VectorXd sol = lu.solve(sys.F);
    errs[idx++] = l2_error(space, sys, sol, u, p).velocity;
  }
  CHECK(std::log2(errs[0] / errs[1]) > 2.5);
  CHECK(std::log2(errs[1] / errs[2]) > 2.5);
}

TEST_CASE("NVTF boundary: normal constraint plus tangential-flux load converge") {
  // u = curl(sin pi x sin pi y) + ((y-1/2)^2, 0): u_n = 0 on top/bottom
  auto u = [](const Vec2& v) {
    const double x = v.x(), y = v.y();
    return Vec2(kPi * std::sin(kPi * x) * std::cos(kPi * y) + (y - 0.5) * (y - 0.5),
                -kPi * std::cos(kPi * x) * std::sin(kPi * y));
  };
  auto p = [](const Vec2& v) { return v.x() + v.y() - 1.0; };
  auto f = [](const Vec2& v) {
    const double x = v.x(), y = v.y();
    // -lap u + grad p
    return Vec2(2.0 * std::pow(kPi, 3) * std::sin(kPi * x) * std::cos(kPi * y) - 2.0 + 1.0,
                -2.0 * std::pow(kPi, 3) * std::cos(kPi * x) * std::sin(kPi * y) + 1.0);
  };
  auto g = [](const Vec2& v) {
    // sigma_nt with n the outward normal, t = perp(n): on y=0, n=(0,-1),
    // t=(1,0): g = -du_x/dy; on y=1, n=(0,1), t=(-1,0): g = -du_x/dy as well
    const double x = v.x(), y = v.y();
    const double dux_dy = -kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y) + 2.0 * (y - 0.5);
    return -dux_dy;
  };
  StokesProblem prob;
  prob.viscosity = 1.0;
  prob.body_force = f;
  prob.bc.by_tag["left"] = BoundaryCondition::dirichlet(u);
  prob.bc.by_tag["right"] = BoundaryCondition::dirichlet(u);
  prob.bc.by_tag["bottom"] = BoundaryCondition::flux(BCKind::NVTF, g);
  prob.bc.by_tag["top"] = BoundaryCondition::flux(BCKind::NVTF, g);

  double errs[3];
  int idx = 0;
  for (int res : {4, 8, 16}) {
    Mesh mesh = build_structured_mesh(DomainShape::unit_square(), res);
    Space space = build_space(mesh, Scheme::TaylorHood, 2);
    LinearSystem sys = assemble_taylor_hood(space, Problem(prob));
    Factorization lu(sys.A);
    Eigen::VectorXd sol = lu.solve(sys.F);
    errs[idx++] = l2_error(space, sys, sol, u, p).velocity;
  }
  CHECK(std::log2(errs[0] / errs[1]) > 2.5);
  CHECK(std::log2(errs[1] / errs[2]) > 2.5);
}

TEST_CASE("missing boundary assignments are rejected") {
  Mesh mesh = build_structured_mesh(DomainShape::unit_square(), 2);
  Space space = build_space(mesh, Scheme::TaylorHood, 2);
  StokesProblem prob;  // bc.by_tag left empty
  CHECK_THROWS(assemble_taylor_hood(space, Problem(prob)));
}
