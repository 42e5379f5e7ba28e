#include "ddlab/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace ddlab {

VectorField zero_vector_field() {
  return [](const Vec2&) { return Vec2::Zero().eval(); };
}

ScalarField zero_scalar_field() {
  return [](const Vec2&) { return 0.0; };
}

BoundaryCondition BoundaryCondition::dirichlet(VectorField u_d) {
  BoundaryCondition bc;
  bc.kind = BCKind::Dirichlet;
  bc.value = std::move(u_d);
  bc.g = zero_scalar_field();
  return bc;
}

BoundaryCondition BoundaryCondition::traction_free() {
  BoundaryCondition bc;
  bc.kind = BCKind::Traction;
  bc.value = zero_vector_field();
  bc.g = zero_scalar_field();
  return bc;
}

BoundaryCondition BoundaryCondition::flux(BCKind kind, ScalarField g) {
  if (kind != BCKind::TVNF && kind != BCKind::NVTF && kind != BCKind::TDNNS &&
      kind != BCKind::NDTNS)
    throw std::invalid_argument("BoundaryCondition::flux: not a flux-type condition");
  BoundaryCondition bc;
  bc.kind = kind;
  bc.value = zero_vector_field();
  bc.g = std::move(g);
  return bc;
}

const BoundaryCondition& BoundaryConditionSpec::at(const std::string& tag) const {
  auto it = by_tag.find(tag);
  if (it == by_tag.end())
    throw std::invalid_argument("BoundaryConditionSpec: no condition for tag '" + tag + "'");
  return it->second;
}

std::pair<double, double> lame_parameters(double young, double poisson) {
  if (young <= 0) throw std::invalid_argument("lame_parameters: Young modulus must be positive");
  if (poisson < 0 || poisson >= 0.5)
    throw std::invalid_argument("lame_parameters: Poisson ratio must lie in [0, 0.5)");
  double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  double mu = young / (2.0 * (1.0 + poisson));
  return {lambda, mu};
}

std::pair<double, double> ElasticityProblem::lame(int region) const {
  auto it = materials.find(region);
  if (it == materials.end())
    throw std::invalid_argument("ElasticityProblem: no material for region " +
                                std::to_string(region));
  return lame_parameters(it->second.young, it->second.poisson);
}

bool is_stokes(const Problem& p) { return std::holds_alternative<StokesProblem>(p); }

const BoundaryConditionSpec& boundary_conditions(const Problem& p) {
  if (is_stokes(p)) return std::get<StokesProblem>(p).bc;
  return std::get<ElasticityProblem>(p).bc;
}

ProblemCoefficients problem_coefficients(const Problem& p, int num_regions) {
  ProblemCoefficients c;
  c.a_coef.resize(num_regions);
  c.inv_lambda.resize(num_regions);
  c.robin_base.resize(num_regions);
  if (const auto* stokes = std::get_if<StokesProblem>(&p)) {
    if (stokes->viscosity <= 0) throw std::invalid_argument("Stokes viscosity must be positive");
    c.symmetric_gradient = false;
    c.body_force = stokes->body_force;
    for (int r = 0; r < num_regions; ++r) {
      c.a_coef[r] = stokes->viscosity;
      c.inv_lambda[r] = 0.0;
      c.robin_base[r] = stokes->viscosity;
    }
  } else {
    const auto& el = std::get<ElasticityProblem>(p);
    c.symmetric_gradient = true;
    c.body_force = el.body_force;
    for (int r = 0; r < num_regions; ++r) {
      auto [lambda, mu] = el.lame(r);
      c.a_coef[r] = 2.0 * mu;
      c.inv_lambda[r] = 1.0 / lambda;
      c.robin_base[r] = 2.0 * mu * (2.0 * mu + lambda) / (lambda + 3.0 * mu);
    }
  }
  return c;
}

TestCase canonical_test_case(const std::string& name) {
  TestCase tc;
  tc.name = name;
  if (name == "l_shape_elasticity") {
    tc.shape = DomainShape::l_shape(BoundaryRule::LShapeClamp);
    ElasticityProblem prob;
    prob.materials[0] = Material{1e5, 0.4999};
    prob.body_force = [](const Vec2&) { return Vec2(0.0, -1.0); };
    prob.bc.by_tag["gamma_d"] = BoundaryCondition::dirichlet(zero_vector_field());
    prob.bc.by_tag["gamma_n"] = BoundaryCondition::traction_free();
    tc.problem = prob;
    tc.initial_guess = InitialGuessRule::Zero;
  } else if (name == "hetero_beam") {
    // Rectangle (0,5)x(0,1), ten alternating steel/rubber bands in y,
    // clamped at x=0, traction-free elsewhere.
    tc.shape = DomainShape::rectangle(5.0, 1.0, BoundaryRule::BeamClamp);
    tc.shape.layers = LayerSpec{10, 1};
    ElasticityProblem prob;
    for (int band = 0; band < 10; ++band)
      prob.materials[band] = band % 2 == 0 ? Material{210e9, 0.3} : Material{1e8, 0.4999};
    prob.body_force = [](const Vec2&) { return Vec2(0.0, -1.0); };
    prob.bc.by_tag["gamma_d"] = BoundaryCondition::dirichlet(zero_vector_field());
    prob.bc.by_tag["gamma_n"] = BoundaryCondition::traction_free();
    tc.problem = prob;
    tc.initial_guess = InitialGuessRule::Zero;
  } else if (name == "cavity") {
    tc.shape = DomainShape::unit_square(BoundaryRule::CavityLid);
    StokesProblem prob;
    prob.viscosity = 1.0;
    auto lid = [](const Vec2& x) { return x.y() > 1.0 - 1e-9 ? Vec2(1.0, 0.0) : Vec2(0.0, 0.0); };
    prob.bc.by_tag["lid"] = BoundaryCondition::dirichlet(lid);
    prob.bc.by_tag["wall"] = BoundaryCondition::dirichlet(lid);
    tc.problem = prob;
    tc.initial_guess = InitialGuessRule::Random;
  } else if (name == "t_shape") {
    tc.shape = DomainShape::t_shape(BoundaryRule::TShapeInOut);
    StokesProblem prob;
    prob.viscosity = 1.0;
    auto profile = [](const Vec2& x) { return Vec2(4.0 * x.y() * (1.0 - x.y()), 0.0); };
    prob.bc.by_tag["inflow"] = BoundaryCondition::dirichlet(profile);
    prob.bc.by_tag["outflow"] = BoundaryCondition::dirichlet(profile);
    prob.bc.by_tag["wall"] = BoundaryCondition::dirichlet(zero_vector_field());
    tc.problem = prob;
    tc.initial_guess = InitialGuessRule::Zero;
  } else {
    throw std::invalid_argument("canonical_test_case: unknown name '" + name + "'");
  }
  return tc;
}

}  // namespace ddlab
