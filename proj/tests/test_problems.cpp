#include "ddlab/problems.hpp"

#include <doctest.h>

#include <set>

using namespace ddlab;

TEST_CASE("lame_parameters matches the closed forms") {
  // inputs of the nearly incompressible L-shape case
  auto [lambda, mu] = lame_parameters(1e5, 0.4999);
  CHECK(mu == doctest::Approx(3.33356e4).epsilon(1e-4));
  CHECK(lambda == doctest::Approx(1.66642e8).epsilon(1e-4));

  // steel
  auto [l2, m2] = lame_parameters(210e9, 0.3);
  CHECK(m2 == doctest::Approx(8.0769e10).epsilon(1e-4));
  CHECK(l2 == doctest::Approx(1.2115e11).epsilon(1e-4));

  // zero Poisson ratio
  auto [l3, m3] = lame_parameters(7.0, 0.0);
  CHECK(l3 == 0.0);
  CHECK(m3 == doctest::Approx(3.5));
}

TEST_CASE("lame_parameters rejects the incompressible limit") {
  CHECK_THROWS(lame_parameters(1e5, 0.5));
  CHECK_THROWS(lame_parameters(1e5, 0.75));
  CHECK_THROWS(lame_parameters(-1.0, 0.3));
}

TEST_CASE("lame_parameters scales linearly in E") {
  auto [l1, m1] = lame_parameters(1e5, 0.3);
  auto [l2, m2] = lame_parameters(3e5, 0.3);
  CHECK(l2 == doctest::Approx(3 * l1).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(3 * m1).epsilon(1e-13));
}

TEST_CASE("canonical test cases carry the stated data") {
  TestCase l = canonical_test_case("l_shape_elasticity");
  CHECK(l.shape.kind == DomainKind::LShape);
  CHECK(l.initial_guess == InitialGuessRule::Zero);
  const auto& le = std::get<ElasticityProblem>(l.problem);
  CHECK(le.materials.at(0).young == doctest::Approx(1e5));
  CHECK(le.materials.at(0).poisson == doctest::Approx(0.4999));
  CHECK(le.body_force(Vec2(0.3, 0.2)) == Vec2(0.0, -1.0));

  TestCase c = canonical_test_case("cavity");
  CHECK(is_stokes(c.problem));
  CHECK(c.initial_guess == InitialGuessRule::Random);
  const auto& cs = std::get<StokesProblem>(c.problem);
  CHECK(cs.viscosity == 1.0);
  CHECK(cs.bc.at("lid").value(Vec2(0.5, 1.0)) == Vec2(1.0, 0.0));
  CHECK(cs.bc.at("wall").value(Vec2(0.0, 0.5)) == Vec2(0.0, 0.0));

  TestCase t = canonical_test_case("t_shape");
  const auto& ts = std::get<StokesProblem>(t.problem);
  CHECK(ts.bc.at("inflow").value(Vec2(0.0, 0.5)) == Vec2(1.0, 0.0));
  CHECK(ts.bc.at("outflow").value(Vec2(1.5, 0.25)).x() == doctest::Approx(4 * 0.25 * 0.75));

  CHECK_THROWS(canonical_test_case("no_such_case"));
}

TEST_CASE("the beam alternates exactly two materials") {
  TestCase b = canonical_test_case("hetero_beam");
  const auto& be = std::get<ElasticityProblem>(b.problem);
  REQUIRE(be.materials.size() == 10);
  std::set<std::pair<double, double>> lame_pairs;
  for (int band = 0; band < 10; ++band) lame_pairs.insert(be.lame(band));
  CHECK(lame_pairs.size() == 2);
  for (int band = 0; band + 2 < 10; ++band) CHECK(be.lame(band) == be.lame(band + 2));
  CHECK(be.lame(0) != be.lame(1));
}

TEST_CASE("problem coefficients flatten materials per region") {
  TestCase b = canonical_test_case("hetero_beam");
  ProblemCoefficients pc = problem_coefficients(b.problem, 10);
  CHECK(pc.symmetric_gradient);
  const auto& be = std::get<ElasticityProblem>(b.problem);
  for (int r = 0; r < 10; ++r) {
    auto [lambda, mu] = be.lame(r);
    CHECK(pc.a_coef[r] == doctest::Approx(2 * mu));
    CHECK(pc.inv_lambda[r] == doctest::Approx(1 / lambda));
    CHECK(pc.robin_base[r] ==
          doctest::Approx(2 * mu * (2 * mu + lambda) / (lambda + 3 * mu)));
  }

  StokesProblem s;
  s.viscosity = 2.5;
  ProblemCoefficients sc = problem_coefficients(Problem(s), 1);
  CHECK_FALSE(sc.symmetric_gradient);
  CHECK(sc.a_coef[0] == 2.5);
  CHECK(sc.inv_lambda[0] == 0.0);
  CHECK(sc.robin_base[0] == 2.5);
}
