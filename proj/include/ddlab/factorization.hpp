#pragma once

#include "ddlab/linear_system.hpp"

#include <memory>
#include <stdexcept>

namespace ddlab {

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sparse LU with deterministic (COLAMD) ordering. Immutable after
/// construction; concurrent solves are safe.
class Factorization {
 public:
  explicit Factorization(const SparseMat& a);
  explicit Factorization(const SparseOperator& a) : Factorization(a.mat) {}

  int size() const { return n_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  void solve_in_place(Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  int n_ = 0;
};

Factorization factorize(const SparseOperator& a);

}  // namespace ddlab
