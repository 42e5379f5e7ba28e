#pragma once

#include "ddlab/mesh.hpp"
#include "ddlab/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace ddlab {

/// Node of a reference Lagrange element with its entity attribution.
/// kind: 0 vertex, 1 edge, 2 cell. entity: local vertex/edge id.
/// sub: position along the local edge (0..degree-2) or cell node index.
struct RefNode {
  Vec2 xi;
  int kind = 0;
  int entity = 0;
  int sub = 0;
};

/// Scalar Lagrange basis of degree 1..3 on the reference triangle
/// (0,0)-(1,0)-(0,1). Local edge e runs from vertex e to vertex (e+1)%3,
/// matching Mesh::triangle_facets.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<RefNode>& nodes() const { return nodes_; }

  Eigen::VectorXd values(const Vec2& xi) const;
  Eigen::MatrixX2d gradients(const Vec2& xi) const;

  static const LagrangeBasis& get(int degree);

 private:
  int degree_;
  std::vector<RefNode> nodes_;
  std::vector<std::pair<int, int>> monomials_;
  Eigen::MatrixXd coeffs_;  // column j: monomial coefficients of basis j
};

struct AffineMap {
  Vec2 origin;
  Eigen::Matrix2d jac;      // d x / d xi
  Eigen::Matrix2d jac_inv;  // d xi / d x
  double det = 0;

  static AffineMap from_triangle(const Mesh& mesh, int k);
  Vec2 to_physical(const Vec2& xi) const { return origin + jac * xi; }
  Vec2 to_reference(const Vec2& x) const { return jac_inv * (x - origin); }
};

/// BDM_1 velocity element on one physical triangle. The six basis fields are
/// dual to the global facet functionals
///   l_{E,m}(v) = int_E (v . n_E) q_m ds,  q_0 = 1, q_1 = 2s - 1,
/// with n_E and the arc parameter s taken in the facet's global orientation
/// (v0 -> v1), so the two triangles sharing a facet agree on its dofs and
/// normal continuity holds by construction. Dof i = 2*local_edge + moment.
struct BdmBasis {
  Vec2 center;
  double scale = 1;
  Eigen::Matrix<double, 6, 6> coeffs;  // column i: {cx, cx_x, cx_y, cy, cy_x, cy_y}

  Vec2 value(int i, const Vec2& x) const;
  Eigen::Matrix2d gradient(int i) const;  // Jacobian d v_i / d x (constant)
  double divergence(int i) const;
};

BdmBasis build_bdm1(const Mesh& mesh, int k);

/// L2(E)-projection onto P_degree(E), expressed in the shifted Legendre basis
/// {1, 2t-1, 6t^2-6t+1} on the facet parameter t in [0,1]. Projecting twice
/// equals projecting once on each facet's polynomial space.
struct FacetProjection {
  int degree = 0;

  /// Coefficients of the projection of f given its values at rule.points.
  Eigen::VectorXd project(const EdgeRule& rule, const std::vector<double>& fvals) const;
  double evaluate(const Eigen::VectorXd& coef, double t) const;
  static double basis(int m, double t);
};

}  // namespace ddlab
