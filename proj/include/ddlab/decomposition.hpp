#pragma once

#include "ddlab/space.hpp"

#include <Eigen/Core>

#include <vector>

namespace ddlab {

enum class PartitionMethod { UniformGrid, Graph };

/// Overlapping decomposition of a mesh/space pair: the non-overlapping
/// element partition, per-subdomain overlap-expanded element sets, their dof
/// sets (defining the 0/1 restriction R_i) and Boolean partition-of-unity
/// weights D_i with sum_i R_i^T D_i R_i = Id exactly.
struct Decomposition {
  int n_subdomains = 1;
  int overlap = 0;
  std::vector<int> element_owner;                    // triangle -> subdomain
  std::vector<std::vector<int>> overlapped_elements; // ascending per subdomain
  std::vector<std::vector<int>> dof_sets;            // ascending global dofs per subdomain
  std::vector<Eigen::VectorXd> pu_weights;           // diagonal of D_i (0/1)

  /// R_i r: gather the subdomain's dofs.
  Eigen::VectorXd restrict_to(int i, const Eigen::VectorXd& global) const;
  /// z += R_i^T v: scatter-add (extension by zero).
  void extend_add(int i, const Eigen::VectorXd& local, Eigen::VectorXd& global) const;
};

/// Non-overlapping element partition. UniformGrid bins element centroids on
/// an a x b grid chosen to keep cells square-ish (requires every bin to be
/// nonempty); Graph is recursive coordinate bisection with a connectivity
/// smoothing pass, the METIS stand-in.
std::vector<int> partition_elements(const Mesh& mesh, int n, PartitionMethod method);

/// l layers of vertex-adjacency closure around the owned elements.
std::vector<std::vector<int>> expand_overlap(const Mesh& mesh,
                                             const std::vector<int>& element_owner, int l);

/// Dof sets N_i^l: all dofs supported on the closure of the overlapped
/// element sets, ascending.
std::vector<std::vector<int>> build_restrictions(
    const Space& space, const std::vector<std::vector<int>>& overlapped_elements);

/// Boolean ownership weights: each dof belongs to the lowest-index subdomain
/// whose non-overlapped elements support it.
std::vector<Eigen::VectorXd> build_partition_of_unity(
    const Space& space, const std::vector<int>& element_owner,
    const std::vector<std::vector<int>>& dof_sets);

Decomposition build_decomposition(const Mesh& mesh, const Space& space, int n, int overlap,
                                  PartitionMethod method);

}  // namespace ddlab
