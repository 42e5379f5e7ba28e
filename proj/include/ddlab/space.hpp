#pragma once

#include "ddlab/mesh.hpp"

#include <vector>

namespace ddlab {

enum class Scheme { TaylorHood, HDG };

/// Scalar Lagrange dof layout of one polynomial degree on a mesh: global node
/// numbering is entity-ordered (vertices, then per-facet edge nodes along the
/// facet's global direction, then cell nodes), which makes dof numbering
/// deterministic and orientation-safe across elements.
struct ScalarLayout {
  int degree = 1;
  int count = 0;
  std::vector<Vec2> node_xy;
  std::vector<std::vector<int>> element_nodes;  // per element, reference-basis order
  std::vector<std::vector<int>> facet_nodes;    // nodes lying on each facet
};

ScalarLayout build_scalar_layout(const Mesh& mesh, int degree);

/// Degree-of-freedom map of a Taylor-Hood or lowest-order hdG discretisation.
///
/// Block layout (offsets into one global vector):
///   velocity  [0, velocity_dofs)
///     TH : velocity node n -> dofs (2n, 2n+1)
///     hdG: facet f -> BDM normal moments (2f, 2f+1)
///   pressure  [velocity_dofs, velocity_dofs + pressure_dofs)
///     TH : continuous P_{k-1} nodes; hdG: one dof per triangle
///   multiplier (hdG only) [velocity_dofs + pressure_dofs, total_dofs):
///     one tangential-trace dof per facet
struct Space {
  Scheme scheme = Scheme::TaylorHood;
  int degree = 2;
  const Mesh* mesh = nullptr;

  int velocity_dofs = 0;
  int pressure_dofs = 0;
  int multiplier_dofs = 0;
  int total_dofs = 0;

  ScalarLayout velocity_layout;  // TH only
  ScalarLayout pressure_layout;  // TH only

  int pressure_offset() const { return velocity_dofs; }
  int multiplier_offset() const { return velocity_dofs + pressure_dofs; }
  bool is_velocity_dof(int d) const { return d < velocity_dofs; }
  bool is_pressure_dof(int d) const { return d >= velocity_dofs && d < multiplier_offset(); }

  // hdG dof shorthands
  int bdm_dof(int facet, int moment) const { return 2 * facet + moment; }
  int hdg_pressure_dof(int tri) const { return pressure_offset() + tri; }
  int multiplier_dof(int facet) const { return multiplier_offset() + facet; }

  /// All dofs supported on the closure of triangle k, ascending.
  std::vector<int> dofs_of_element(int k) const;
};

/// TH requires degree in {2,3}; hdG is the lowest-order method (degree 1).
Space build_space(const Mesh& mesh, Scheme scheme, int degree);

}  // namespace ddlab
