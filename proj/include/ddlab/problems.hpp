#pragma once

#include "ddlab/mesh.hpp"

#include <functional>
#include <map>
#include <string>
#include <variant>

namespace ddlab {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;

VectorField zero_vector_field();
ScalarField zero_scalar_field();

/// Boundary condition families. Dirichlet and Traction express the mixed
/// condition through per-tag assignment (Gamma_D tags get Dirichlet, Gamma_N
/// tags get Traction). TVNF/NVTF are the Stokes interface families, TDNNS and
/// NDTNS their elasticity counterparts; they constrain one velocity component
/// and load the complementary flux with g.
enum class BCKind { Dirichlet, Traction, TVNF, NVTF, TDNNS, NDTNS };

struct BoundaryCondition {
  BCKind kind = BCKind::Dirichlet;
  VectorField value;  // Dirichlet data u_D (or traction vector for Traction)
  ScalarField g;      // scalar flux data of TVNF/NVTF/TDNNS/NDTNS

  static BoundaryCondition dirichlet(VectorField u_d);
  static BoundaryCondition traction_free();
  static BoundaryCondition flux(BCKind kind, ScalarField g);
};

/// Per-tag boundary assignment; every mesh tag must be covered.
struct BoundaryConditionSpec {
  std::map<std::string, BoundaryCondition> by_tag;

  const BoundaryCondition& at(const std::string& tag) const;
};

struct Material {
  double young = 1.0;
  double poisson = 0.0;
};

/// lambda = E nu / ((1+nu)(1-2nu)), mu = E / (2(1+nu)); rejects nu >= 0.5.
std::pair<double, double> lame_parameters(double young, double poisson);

struct StokesProblem {
  double viscosity = 1.0;
  VectorField body_force = zero_vector_field();
  BoundaryConditionSpec bc;
};

struct ElasticityProblem {
  std::map<int, Material> materials;  // region id -> material
  VectorField body_force = zero_vector_field();
  BoundaryConditionSpec bc;

  std::pair<double, double> lame(int region) const;
};

using Problem = std::variant<StokesProblem, ElasticityProblem>;

bool is_stokes(const Problem& p);
const BoundaryConditionSpec& boundary_conditions(const Problem& p);

/// Flattened per-region coefficient view used by the assemblers.
///   a_coef:      nu (Stokes) or 2 mu (elasticity), factor of the grad/eps form
///   inv_lambda:  0 (Stokes) or 1/lambda, factor of the pressure mass term
///   robin_base:  Robin boundary mass per unit alpha:
///                nu (Stokes) or 2 mu (2 mu + lambda)/(lambda + 3 mu)
struct ProblemCoefficients {
  bool symmetric_gradient = false;  // elasticity uses eps(u):eps(v)
  std::vector<double> a_coef;
  std::vector<double> inv_lambda;
  std::vector<double> robin_base;
  VectorField body_force;
};

ProblemCoefficients problem_coefficients(const Problem& p, int num_regions);

enum class InitialGuessRule { Zero, Random };

/// Canonical experiment setups: mesh recipe, PDE problem and the initial
/// guess rule used by the iteration-count experiments.
struct TestCase {
  std::string name;
  DomainShape shape;
  Problem problem;
  InitialGuessRule initial_guess = InitialGuessRule::Zero;
};

/// name in {l_shape_elasticity, hetero_beam, cavity, t_shape}.
TestCase canonical_test_case(const std::string& name);

}  // namespace ddlab
