#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace ddlab {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BlockLayout {
  int velocity = 0;
  int pressure = 0;
  int multiplier = 0;
  bool augmented = false;

  int physical() const { return velocity + pressure + multiplier; }
  int total() const { return physical() + (augmented ? 1 : 0); }
};

/// Compressed sparse (row-major) operator with velocity/pressure/multiplier/
/// augmentation block metadata.
struct SparseOperator {
  SparseMat mat;
  BlockLayout blocks;

  int rows() const { return static_cast<int>(mat.rows()); }
  int cols() const { return static_cast<int>(mat.cols()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return mat * x; }
};

/// Velocity node whose two dofs were rotated into the (normal, tangent) frame
/// so a single-component constraint becomes a plain row elimination.
/// dof_n carries the normal component, dof_t the tangential one.
struct NodeRotation {
  int dof_n = -1;
  int dof_t = -1;
  double nx = 1;
  double ny = 0;
};

/// Assembled system A x = F. Constraints are eliminated symmetrically:
/// constrained rows and columns are cleared, the diagonal set to 1 and F to
/// the boundary value, so A stays symmetric whenever the form is. If the
/// boundary data only fixes pressure up to a constant, a mean-zero pressure
/// Lagrange-multiplier row/column (the pressure mass weights) is appended.
struct LinearSystem {
  SparseOperator A;
  Eigen::VectorXd F;
  std::vector<int> constrained;         // ascending dof ids, system frame
  std::vector<NodeRotation> rotations;  // empty unless normal/tangent constraints exist

  int size() const { return A.rows(); }
  bool has_rotation() const { return !rotations.empty(); }

  /// Standard -> system frame (v := Q^T v) and back (v := Q v).
  void to_system_frame(Eigen::VectorXd& v) const;
  void from_system_frame(Eigen::VectorXd& v) const;

  /// Q A Q^T: the operator expressed in the standard frame (generalised
  /// eigenproblems pair matrices with different rotation sets).
  SparseMat standard_frame_matrix() const;
};

}  // namespace ddlab
