#pragma once

#include "ddlab/linear_system.hpp"

#include <complex>
#include <vector>

namespace ddlab {

struct GeneralizedEigenPair {
  std::complex<double> lambda;
  Eigen::VectorXd vector;  // unit Euclidean norm; real part for complex pairs
  double residual = 0;     // ||A v - Re(lambda) B v|| / ((||A|| + |lambda| ||B||) ||v||)

  bool is_real(double tol = 1e-8) const {
    return std::abs(lambda.imag()) <= tol * (1.0 + std::abs(lambda.real()));
  }
};

struct EigsOptions {
  /// Shift in eigenvalue units; NaN selects -1e-6 * (||A||_1 / ||B||_1),
  /// which keeps (A - shift B) invertible on floating subdomains without
  /// reordering the smallest eigenvalues.
  double shift = std::numeric_limits<double>::quiet_NaN();
  double residual_tol = 1e-8;
  int max_subspace = 0;  // 0: grow automatically
};

/// `count` eigenpairs of A v = lambda B v of smallest |lambda|, via
/// shift-invert Arnoldi on (A - shift B)^{-1} B with full
/// re-orthogonalisation. Falls back to dense QZ for dimensions <= 2000 if
/// the iteration does not deliver residual-checked pairs. Ordering is
/// ascending (|lambda|, Re lambda); breakdown of the shifted factorisation is
/// retried with a perturbed shift before giving up.
std::vector<GeneralizedEigenPair> generalized_eigs(const SparseMat& a, const SparseMat& b,
                                                   int count, const EigsOptions& options = {});

/// Dense QZ of the full pencil: every finite eigenvalue, ascending
/// (|lambda|, Re lambda). The test oracle for the shift-invert path.
std::vector<std::complex<double>> generalized_eigs_dense(const Eigen::MatrixXd& a,
                                                         const Eigen::MatrixXd& b);

/// max column abs sum; the matrix scale used for shifts and residual tests.
double one_norm(const SparseMat& m);

}  // namespace ddlab
