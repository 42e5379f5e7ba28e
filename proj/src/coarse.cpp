#include "ddlab/coarse.hpp"

#include "ddlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Smallest |pivot| of a full-pivot LU, relative to the largest.
double relative_min_pivot(const MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  Eigen::FullPivLU<MatrixXd> lu(m);
  VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double pmax = piv.maxCoeff();
  if (pmax == 0.0) return 0.0;
  return piv.minCoeff() / pmax;
}

}  // namespace

VectorXd CoarseSpace::coarse_solve(const VectorXd& rhs) const {
  if (empty()) return VectorXd::Zero(0);
  return e0_lu_.solve(rhs);
}

VectorXd CoarseSpace::project(const VectorXd& v) const {
  if (empty()) return VectorXd::Zero(v.size());
  return basis_ * coarse_solve(a_basis_.transpose() * v);
}

CoarseSpace CoarseSpace::from_columns(const SparseOperator& a, const MatrixXd& columns,
                                      std::vector<CoarseColumnInfo> provenance) {
  const int n = a.rows();
  const int m = static_cast<int>(columns.cols());
  if (columns.rows() != n)
    throw std::invalid_argument("CoarseSpace::from_columns: column dimension mismatch");
  if (static_cast<size_t>(m) != provenance.size())
    throw std::invalid_argument("CoarseSpace::from_columns: provenance size mismatch");

  CoarseSpace cs;
  MatrixXd z(n, m), az(n, m), e0(m, m);
  int accepted = 0;
  for (int c = 0; c < m; ++c) {
    VectorXd col = columns.col(c);
    VectorXd acol = a.mat * col;
    // tentatively extend E0 and keep the column only if the factorisation
    // pivots stay healthy
    MatrixXd trial(accepted + 1, accepted + 1);
    trial.topLeftCorner(accepted, accepted) = e0.topLeftCorner(accepted, accepted);
    for (int i = 0; i < accepted; ++i) {
      const double v = z.col(i).dot(acol);
      trial(i, accepted) = v;
      trial(accepted, i) = v;
    }
    trial(accepted, accepted) = col.dot(acol);
    if (relative_min_pivot(trial) < 1e-12) {
      cs.dropped_.push_back(provenance[c]);
      continue;
    }
    z.col(accepted) = col;
    az.col(accepted) = acol;
    e0.topLeftCorner(accepted + 1, accepted + 1) = trial;
    cs.provenance_.push_back(provenance[c]);
    ++accepted;
  }

  cs.basis_ = z.leftCols(accepted);
  cs.a_basis_ = az.leftCols(accepted);
  cs.e0_ = e0.topLeftCorner(accepted, accepted);
  if (accepted > 0) cs.e0_lu_.compute(cs.e0_);
  return cs;
}

std::vector<GeneralizedEigenPair> solve_geneo(int subdomain, const Decomposition& decomp,
                                              const Space& space, const Problem& problem,
                                              const PreconditionerSpec& spec,
                                              const CoarseSpec& coarse,
                                              const AssemblyOptions& options) {
  if (subdomain < 0 || subdomain >= decomp.n_subdomains)
    throw std::invalid_argument("solve_geneo: bad subdomain index");

  AssemblyOptions local = options;
  local.robin_alpha = spec.robin_alpha;
  local.allow_augmentation = false;  // pencil matrices must share one dimension

  const auto& elements = decomp.overlapped_elements[subdomain];
  const auto& dofs = decomp.dof_sets[subdomain];
  LinearSystem neumann =
      assemble_local(space, problem, elements, dofs, InterfaceCondition::Neumann, local);
  LinearSystem bmat = assemble_local(space, problem, elements, dofs, spec.interface, local);

  SparseMat a_tilde = neumann.standard_frame_matrix();
  SparseMat b = bmat.standard_frame_matrix();

  EigsOptions eo;
  eo.shift = coarse.shift;

  const int n = static_cast<int>(dofs.size());
  if (coarse.selection == CoarseSpec::Selection::FixedCount)
    return generalized_eigs(a_tilde, b, std::min(coarse.count, n), eo);

  // threshold mode: grow the request until a value >= theta shows up
  int request = std::min(n, 8);
  for (;;) {
    auto pairs = generalized_eigs(a_tilde, b, request, eo);
    const bool saturated =
        std::abs(pairs.back().lambda) >= coarse.theta || request == n;
    if (saturated) {
      pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                                 [&](const GeneralizedEigenPair& p) {
                                   return !(p.lambda.real() < coarse.theta);
                                 }),
                  pairs.end());
      return pairs;
    }
    request = std::min(2 * request, n);
  }
}

std::vector<std::vector<GeneralizedEigenPair>> solve_geneo_all(const Decomposition& decomp,
                                                               const Space& space,
                                                               const Problem& problem,
                                                               const PreconditionerSpec& spec,
                                                               const CoarseSpec& coarse,
                                                               const AssemblyOptions& options) {
  std::vector<std::vector<GeneralizedEigenPair>> out(decomp.n_subdomains);
  parallel_for(decomp.n_subdomains, [&](int j) {
    out[j] = solve_geneo(j, decomp, space, problem, spec, coarse, options);
  });
  return out;
}

CoarseSpace build_coarse_space(const SparseOperator& a, const Decomposition& decomp,
                               const std::vector<std::vector<GeneralizedEigenPair>>& eigenpairs,
                               const CoarseSpec& spec) {
  const int n = a.rows();

  std::vector<VectorXd> cols;
  std::vector<CoarseColumnInfo> prov;
  for (int j = 0; j < decomp.n_subdomains; ++j) {
    const auto& pairs = eigenpairs[j];
    int take = static_cast<int>(pairs.size());
    if (spec.selection == CoarseSpec::Selection::FixedCount)
      take = std::min(take, spec.count);

    // D_j V_jk on the subdomain, orthonormalised within the subdomain
    std::vector<VectorXd> local_cols;
    std::vector<CoarseColumnInfo> local_prov;
    for (int k = 0; k < take; ++k) {
      const GeneralizedEigenPair& p = pairs[k];
      if (!p.is_real()) continue;  // a real basis cannot carry complex pairs
      VectorXd v = p.vector.cwiseProduct(decomp.pu_weights[j]);
      for (const VectorXd& q : local_cols) v -= q.dot(v) * q;
      const double nn = v.norm();
      if (nn < 1e-10) {
        // dependent within the subdomain (e.g. D_j annihilated it)
        continue;
      }
      local_cols.push_back(v / nn);
      local_prov.push_back({j, k, p.lambda.real()});
    }
    for (size_t c = 0; c < local_cols.size(); ++c) {
      VectorXd global = VectorXd::Zero(n);
      const auto& dofs = decomp.dof_sets[j];
      for (size_t idx = 0; idx < dofs.size(); ++idx) global(dofs[idx]) = local_cols[c](idx);
      cols.push_back(std::move(global));
      prov.push_back(local_prov[c]);
    }
  }

  MatrixXd columns(n, cols.size());
  for (size_t c = 0; c < cols.size(); ++c) columns.col(c) = cols[c];
  return CoarseSpace::from_columns(a, columns, std::move(prov));
}

Eigen::VectorXd TwoLevelPreconditioner::apply(const Eigen::VectorXd& r) const {
  if (coarse_->empty()) return one_level_->apply(r);
  const MatrixXd& z = coarse_->basis();
  const MatrixXd& az = coarse_->a_basis();

  VectorXd y1 = coarse_->coarse_solve(z.transpose() * r);
  VectorXd r2 = r - az * y1;                    // (Id - P_0^T) r
  VectorXd z2 = one_level_->apply(r2);
  VectorXd y3 = coarse_->coarse_solve(az.transpose() * z2);
  return z * y1 + (z2 - z * y3);                // P_0 A^{-1} r + (Id - P_0) z2
}

}  // namespace ddlab
