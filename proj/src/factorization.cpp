#include "ddlab/factorization.hpp"

#include <Eigen/SparseLU>

namespace ddlab {

struct Factorization::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

Factorization::Factorization(const SparseMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factorize: matrix must be square");
  n_ = static_cast<int>(a.rows());
  auto impl = std::make_shared<Impl>();
  Eigen::SparseMatrix<double> col_major = a;  // SparseLU wants column storage
  impl->lu.isSymmetric(false);
  impl->lu.compute(col_major);
  if (impl->lu.info() != Eigen::Success)
    throw SingularMatrixError("factorize: " + impl->lu.lastErrorMessage());
  impl_ = std::move(impl);
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw std::invalid_argument("Factorization::solve: size mismatch");
  return impl_->lu.solve(b);
}

void Factorization::solve_in_place(Eigen::VectorXd& b) const { b = solve(b); }

Factorization factorize(const SparseOperator& a) { return Factorization(a); }

}  // namespace ddlab
