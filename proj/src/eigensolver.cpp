#include "ddlab/eigensolver.hpp"

#include "ddlab/factorization.hpp"
#include "ddlab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace ddlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

bool eig_less(const Complex& a, const Complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void normalize_sign(VectorXd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
}

double pencil_residual(const SparseMat& a, const SparseMat& b, const Complex& lambda,
                       const VectorXd& vr, const VectorXd& vi, double norm_a, double norm_b) {
  // ||(A - lambda B)(vr + i vi)|| in real arithmetic
  const VectorXd avr = a * vr, bvr = b * vr;
  const VectorXd avi = a * vi, bvi = b * vi;
  const double lr = lambda.real(), li = lambda.imag();
  const VectorXd res_re = avr - lr * bvr + li * bvi;
  const VectorXd res_im = avi - lr * bvi - li * bvr;
  const double vnorm = std::sqrt(vr.squaredNorm() + vi.squaredNorm());
  const double scale = (norm_a + std::abs(lambda) * norm_b) * (vnorm > 0 ? vnorm : 1.0);
  return std::sqrt(res_re.squaredNorm() + res_im.squaredNorm()) / (scale > 0 ? scale : 1.0);
}

struct RitzSet {
  std::vector<Complex> lambdas;  // ascending (|.|, Re)
  MatrixXd vectors_re;           // per Ritz value
  MatrixXd vectors_im;
  MatrixXd next_basis;           // real span of the Ritz vectors, for the next sweep
};

/// Rayleigh-Ritz of the pencil on span(q): dense QZ of (q^T A q, q^T B q).
std::optional<RitzSet> rayleigh_ritz(const SparseMat& a, const SparseMat& b, const MatrixXd& q) {
  const int p = static_cast<int>(q.cols());
  MatrixXd ap = q.transpose() * (a * q).eval();
  MatrixXd bp = q.transpose() * (b * q).eval();
  Eigen::GeneralizedEigenSolver<MatrixXd> ges;
  ges.compute(ap, bp, true);
  if (ges.info() != Eigen::Success) return std::nullopt;

  std::vector<int> order;
  const double beta_scale = std::max(ges.betas().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < p; ++i)
    if (std::abs(ges.betas()(i)) > 1e-13 * beta_scale) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return eig_less(ges.alphas()(x) / ges.betas()(x), ges.alphas()(y) / ges.betas()(y));
  });

  RitzSet rs;
  const int m = static_cast<int>(order.size());
  rs.vectors_re.resize(q.rows(), m);
  rs.vectors_im.resize(q.rows(), m);
  rs.next_basis.resize(q.rows(), m);
  for (int r = 0; r < m; ++r) {
    const int i = order[r];
    rs.lambdas.push_back(ges.alphas()(i) / ges.betas()(i));
    Eigen::VectorXcd y = ges.eigenvectors().col(i);
    rs.vectors_re.col(r) = q * y.real();
    rs.vectors_im.col(r) = q * y.imag();
    // complex pairs alternate re/im as independent real directions
    const bool use_im = r > 0 && rs.lambdas[r] == std::conj(rs.lambdas[r - 1]) &&
                        rs.lambdas[r].imag() != 0.0;
    rs.next_basis.col(r) = use_im ? rs.vectors_im.col(r) : rs.vectors_re.col(r);
  }
  return rs;
}

std::optional<std::vector<GeneralizedEigenPair>> extract_checked(const SparseMat& a,
                                                                 const SparseMat& b,
                                                                 const RitzSet& rs, int count,
                                                                 double tol, double norm_a,
                                                                 double norm_b) {
  if (static_cast<int>(rs.lambdas.size()) < count) return std::nullopt;
  std::vector<GeneralizedEigenPair> out;
  for (int r = 0; r < count; ++r) {
    GeneralizedEigenPair p;
    p.lambda = rs.lambdas[r];
    if (std::abs(p.lambda.imag()) <= 1e-10 * (1.0 + std::abs(p.lambda.real()))) {
      p.lambda = Complex(p.lambda.real(), 0.0);
      p.vector = rs.vectors_re.col(r);
      if (p.vector.norm() < 1e-300) p.vector = rs.vectors_im.col(r);
      p.vector /= p.vector.norm();
      p.residual = pencil_residual(a, b, p.lambda, p.vector,
                                   VectorXd::Zero(p.vector.size()), norm_a, norm_b);
    } else {
      VectorXd vr = rs.vectors_re.col(r), vi = rs.vectors_im.col(r);
      p.residual = pencil_residual(a, b, p.lambda, vr, vi, norm_a, norm_b);
      p.vector = vr.norm() >= vi.norm() ? vr : vi;
      p.vector /= p.vector.norm();
    }
    if (p.residual > tol) return std::nullopt;
    normalize_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

/// Shift-invert block subspace iteration with Rayleigh-Ritz projection.
/// The block makes degenerate eigenvalues (rigid body modes, constants)
/// converge together instead of leaking in one at a time.
std::optional<std::vector<GeneralizedEigenPair>> shift_invert_attempt(
    const SparseMat& a, const SparseMat& b, int count, double shift, int block, int sweeps,
    double tol, double norm_a, double norm_b) {
  const int n = static_cast<int>(a.rows());
  block = std::min(block, n);

  SparseMat shifted = a - shift * b;
  Factorization lu{shifted};

  Rng rng(0x5eed5eed5eed5eedULL);
  MatrixXd x(n, block);
  for (int j = 0; j < block; ++j) x.col(j) = rng.vector(n);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    MatrixXd y(n, x.cols());
    for (int j = 0; j < x.cols(); ++j) y.col(j) = lu.solve(b * x.col(j));

    Eigen::HouseholderQR<MatrixXd> qr(y);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, y.cols());

    auto rs = rayleigh_ritz(a, b, q);
    if (!rs) return std::nullopt;
    if (auto pairs = extract_checked(a, b, *rs, count, tol, norm_a, norm_b)) return pairs;
    x = rs->next_basis;
    if (x.cols() == 0) return std::nullopt;
  }
  return std::nullopt;
}

std::vector<GeneralizedEigenPair> dense_fallback(const SparseMat& a, const SparseMat& b, int count,
                                                 double norm_a, double norm_b) {
  const int n = static_cast<int>(a.rows());
  MatrixXd ad = MatrixXd(a), bd = MatrixXd(b);
  Eigen::GeneralizedEigenSolver<MatrixXd> ges;
  ges.compute(ad, bd, true);
  if (ges.info() != Eigen::Success) throw std::runtime_error("generalized_eigs: dense QZ failed");

  std::vector<std::pair<Complex, int>> finite;
  const double beta_scale = std::max(ges.betas().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < n; ++i) {
    if (std::abs(ges.betas()(i)) <= 1e-12 * beta_scale) continue;
    finite.emplace_back(ges.alphas()(i) / ges.betas()(i), i);
  }
  std::sort(finite.begin(), finite.end(),
            [](auto& x, auto& y) { return eig_less(x.first, y.first); });
  if (static_cast<int>(finite.size()) < count)
    throw std::runtime_error(
        "generalized_eigs: pencil has fewer finite eigenvalues than requested");

  std::vector<GeneralizedEigenPair> out;
  for (int r = 0; r < count; ++r) {
    auto [lambda, idx] = finite[r];
    GeneralizedEigenPair p;
    p.lambda = lambda;
    Eigen::VectorXcd v = ges.eigenvectors().col(idx);
    VectorXd vr = v.real(), vi = v.imag();
    if (std::abs(lambda.imag()) <= 1e-10 * (1.0 + std::abs(lambda.real()))) {
      p.lambda = Complex(lambda.real(), 0.0);
      p.vector = vr.norm() >= vi.norm() ? vr : vi;
      p.vector /= p.vector.norm();
      p.residual = pencil_residual(a, b, p.lambda, p.vector, VectorXd::Zero(n), norm_a, norm_b);
    } else {
      p.residual = pencil_residual(a, b, lambda, vr, vi, norm_a, norm_b);
      p.vector = vr.norm() >= vi.norm() ? vr : vi;
      p.vector /= p.vector.norm();
    }
    normalize_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

double one_norm(const SparseMat& m) {
  VectorXd col_sums = VectorXd::Zero(m.cols());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it) col_sums(it.col()) += std::abs(it.value());
  return col_sums.size() ? col_sums.maxCoeff() : 0.0;
}

std::vector<GeneralizedEigenPair> generalized_eigs(const SparseMat& a, const SparseMat& b,
                                                   int count, const EigsOptions& options) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("generalized_eigs: dimension mismatch");
  if (count < 1) throw std::invalid_argument("generalized_eigs: count must be >= 1");
  const int n = static_cast<int>(a.rows());
  if (count > n) throw std::invalid_argument("generalized_eigs: count exceeds dimension");

  const double norm_a = one_norm(a), norm_b = one_norm(b);
  double shift = options.shift;
  if (std::isnan(shift)) shift = -1e-6 * (norm_b > 0 ? norm_a / norm_b : 1.0);

  int block =
      options.max_subspace > 0 ? options.max_subspace : std::min(n, std::max(2 * count + 8, 16));
  for (int round = 0; round < 3; ++round) {
    double s = shift;
    for (int attempt = 0; attempt < 3; ++attempt) {
      try {
        if (auto res = shift_invert_attempt(a, b, count, s, block, /*sweeps=*/60,
                                            options.residual_tol, norm_a, norm_b))
          return *res;
        break;  // ran out of sweeps; grow the block
      } catch (const SingularMatrixError&) {
        s *= 10.0;  // perturbed shift after a factorisation breakdown
        if (attempt == 2 && n > 2000) throw;
      }
    }
    if (block >= n) break;
    block = std::min(2 * block, n);
  }

  if (n <= 2000) return dense_fallback(a, b, count, norm_a, norm_b);
  throw std::runtime_error("generalized_eigs: shift-invert iteration did not converge");
}

std::vector<Complex> generalized_eigs_dense(const MatrixXd& a, const MatrixXd& b) {
  Eigen::GeneralizedEigenSolver<MatrixXd> ges;
  ges.compute(a, b, false);
  if (ges.info() != Eigen::Success) throw std::runtime_error("generalized_eigs_dense: QZ failed");
  std::vector<Complex> out;
  const double beta_scale = std::max(ges.betas().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < a.rows(); ++i) {
    if (std::abs(ges.betas()(i)) <= 1e-12 * beta_scale) continue;
    out.push_back(ges.alphas()(i) / ges.betas()(i));
  }
  std::sort(out.begin(), out.end(), eig_less);
  return out;
}

}  // namespace ddlab
