#pragma once

#include "ddlab/linear_system.hpp"
#include "ddlab/problems.hpp"
#include "ddlab/space.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace ddlab {

/// Condition attached to one facet during assembly. Robin and Neumann only
/// occur on subdomain interfaces; the other kinds mirror BCKind.
enum class FacetConditionKind { Dirichlet, Traction, TVNF, NVTF, TDNNS, NDTNS, Robin, Neumann };

struct FacetCondition {
  FacetConditionKind kind = FacetConditionKind::Neumann;
  VectorField value;  // Dirichlet / traction data
  ScalarField g;      // flux data of TVNF/NVTF/TDNNS/NDTNS
};

using FacetConditionMap = std::unordered_map<int, FacetCondition>;

/// Interface condition imposed on subdomain boundaries interior to Omega.
enum class InterfaceCondition { TVNF, NVTF, TDNNS, NDTNS, Robin, Neumann, InheritGlobal };

const char* to_string(InterfaceCondition c);

struct AssemblyOptions {
  double tau = 10.0;          // hdG facet penalty
  double robin_alpha = 10.0;  // Robin interface parameter
  bool allow_augmentation = true;
};

/// Facet -> condition map of the global problem (every tagged boundary facet).
FacetConditionMap global_facet_conditions(const Mesh& mesh, const Problem& problem);

/// Facet -> condition map of a subdomain problem: facets of the subset lying
/// on the global boundary keep the global condition, facets on the subdomain
/// interface get `interface` (data-free). InheritGlobal leaves interface
/// facets unconstrained, like Neumann.
FacetConditionMap local_facet_conditions(const Mesh& mesh, const Problem& problem,
                                         std::span<const int> elements,
                                         InterfaceCondition interface);

/// Core assembler over an element subset. `dof_set` lists the global dofs of
/// the subset ascending (empty span = whole space, identity numbering). The
/// returned system is indexed by position in `dof_set`.
LinearSystem assemble(const Space& space, const Problem& problem, const FacetConditionMap& bc,
                      std::span<const int> elements, std::span<const int> dof_set,
                      const AssemblyOptions& options = {});

/// Global Taylor-Hood discretisation of `problem` with its boundary data.
LinearSystem assemble_taylor_hood(const Space& space, const Problem& problem,
                                  const AssemblyOptions& options = {});

/// Global lowest-order hdG discretisation of `problem`.
LinearSystem assemble_hdg(const Space& space, const Problem& problem,
                          const AssemblyOptions& options = {});

/// Subdomain operator: global conditions on the global boundary, `interface`
/// on the subdomain interface.
LinearSystem assemble_local(const Space& space, const Problem& problem,
                            std::span<const int> elements, std::span<const int> dof_set,
                            InterfaceCondition interface, const AssemblyOptions& options = {});

/// L2 errors of a computed solution against smooth reference fields.
struct SolutionError {
  double velocity = 0;
  double pressure = 0;
};

SolutionError l2_error(const Space& space, const LinearSystem& system,
                       const Eigen::VectorXd& solution, const VectorField& u_exact,
                       const ScalarField& p_exact);

}  // namespace ddlab
