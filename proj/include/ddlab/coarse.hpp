#pragma once

#include "ddlab/eigensolver.hpp"
#include "ddlab/schwarz.hpp"

#include <Eigen/Dense>

namespace ddlab {

/// Origin of one coarse basis column.
struct CoarseColumnInfo {
  int subdomain = 0;
  int eig_index = 0;
  double lambda = 0;
};

/// Spectral coarse space: columns of R_0^T are extension-by-zero vectors
/// R_j^T D_j V_jk built from the subdomain eigenpairs, orthonormalised per
/// subdomain and filtered so that E_0 = R_0 A R_0^T stays invertible.
class CoarseSpace {
 public:
  CoarseSpace() = default;

  int dimension() const { return static_cast<int>(basis_.cols()); }
  bool empty() const { return dimension() == 0; }
  const Eigen::MatrixXd& basis() const { return basis_; }      // R_0^T
  const Eigen::MatrixXd& a_basis() const { return a_basis_; }  // A R_0^T
  const Eigen::MatrixXd& coarse_matrix() const { return e0_; }
  const std::vector<CoarseColumnInfo>& provenance() const { return provenance_; }
  const std::vector<CoarseColumnInfo>& dropped() const { return dropped_; }

  Eigen::VectorXd coarse_solve(const Eigen::VectorXd& rhs) const;  // E_0^{-1}
  /// A-orthogonal projection P_0 v = R_0^T E_0^{-1} R_0 A v (A symmetric).
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

  /// Builds E_0 from explicit columns, dropping any column whose admission
  /// pushes the smallest factorisation pivot below 1e-12 of the largest.
  static CoarseSpace from_columns(const SparseOperator& a, const Eigen::MatrixXd& columns,
                                  std::vector<CoarseColumnInfo> provenance);

 private:
  Eigen::MatrixXd basis_, a_basis_, e0_;
  Eigen::PartialPivLU<Eigen::MatrixXd> e0_lu_;
  std::vector<CoarseColumnInfo> provenance_, dropped_;
};

/// GenEO pencil of subdomain j: A~_j (Neumann on the interface, inherited
/// conditions on the global boundary) against B_j (the preconditioner's local
/// matrix, assembled without the bookkeeping mean-pressure row). Returns the
/// requested smallest-|lambda| eigenpairs; for threshold selection the
/// request grows until an eigenvalue >= theta appears.
std::vector<GeneralizedEigenPair> solve_geneo(int subdomain, const Decomposition& decomp,
                                              const Space& space, const Problem& problem,
                                              const PreconditionerSpec& spec,
                                              const CoarseSpec& coarse,
                                              const AssemblyOptions& options);

/// GenEO solves for every subdomain (concurrently).
std::vector<std::vector<GeneralizedEigenPair>> solve_geneo_all(const Decomposition& decomp,
                                                               const Space& space,
                                                               const Problem& problem,
                                                               const PreconditionerSpec& spec,
                                                               const CoarseSpec& coarse,
                                                               const AssemblyOptions& options);

CoarseSpace build_coarse_space(const SparseOperator& a, const Decomposition& decomp,
                               const std::vector<std::vector<GeneralizedEigenPair>>& eigenpairs,
                               const CoarseSpec& spec);

/// Two-level operator
///   M^{-1} = P_0 A^{-1} + (Id - P_0) M_1^{-1} (Id - P_0^T),
/// applied matrix-free through the cached factorisations; with an empty
/// coarse space it reduces to the one-level operator.
class TwoLevelPreconditioner {
 public:
  TwoLevelPreconditioner(const OneLevelPreconditioner& one_level, const CoarseSpace& coarse)
      : one_level_(&one_level), coarse_(&coarse) {}

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

 private:
  const OneLevelPreconditioner* one_level_;
  const CoarseSpace* coarse_;
};

}  // namespace ddlab
