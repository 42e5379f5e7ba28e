#include "ddlab/gmres.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace ddlab {

using Eigen::VectorXd;

StopMonitor residual_monitor(double rtol) {
  auto r0 = std::make_shared<double>(-1.0);
  return [rtol, r0](int, double resnorm, const std::function<const VectorXd&()>&) {
    if (*r0 < 0) *r0 = resnorm > 0 ? resnorm : 1.0;
    return MonitorDecision{resnorm <= rtol * *r0, std::nullopt};
  };
}

StopMonitor error_monitor(const VectorXd& u_ref, const VectorXd& x0, double tol) {
  const double denom = (u_ref - x0).norm();
  return [u_ref, denom, tol](int, double, const std::function<const VectorXd&()>& iterate) {
    const double err = (u_ref - iterate()).norm() / (denom > 0 ? denom : 1.0);
    return MonitorDecision{err < tol, err};
  };
}

std::pair<VectorXd, KrylovTrace> gmres(const LinearOperator& apply_a,
                                       const LinearOperator& apply_m_inv, const VectorXd& b,
                                       const VectorXd& x0, const StopMonitor& monitor, int maxit) {
  const Eigen::Index n = b.size();
  KrylovTrace trace;

  VectorXd x = x0.size() ? x0 : VectorXd::Zero(n);
  VectorXd r = b - apply_a(x);
  const double beta = r.norm();
  if (beta == 0.0) {
    trace.converged = true;
    return {x, trace};
  }

  std::vector<VectorXd> v_basis, z_basis;     // Arnoldi basis and M^{-1} images
  std::vector<VectorXd> r_cols;               // triangularised Hessenberg columns
  std::vector<double> giv_c, giv_s;
  VectorXd g = VectorXd::Zero(1);
  g(0) = beta;

  v_basis.push_back(r / beta);

  auto form_iterate = [&](int m) {
    // back-substitute R y = g(0:m) and expand over the preconditioned basis
    VectorXd y = g.head(m);
    for (int i = m - 1; i >= 0; --i) {
      for (int k = i + 1; k < m; ++k) y(i) -= r_cols[k](i) * y(k);
      y(i) /= r_cols[i](i);
    }
    VectorXd out = x;
    for (int k = 0; k < m; ++k) out += y(k) * z_basis[k];
    return out;
  };

  VectorXd cached_iterate;
  bool stopped = false;
  for (int j = 0; j < maxit && !stopped; ++j) {
    z_basis.push_back(apply_m_inv ? apply_m_inv(v_basis[j]) : v_basis[j]);
    VectorXd w = apply_a(z_basis[j]);

    VectorXd h = VectorXd::Zero(j + 2);
    for (int i = 0; i <= j; ++i) {
      h(i) = w.dot(v_basis[i]);
      w -= h(i) * v_basis[i];
    }
    // one re-orthogonalisation pass keeps the basis usable for long runs
    for (int i = 0; i <= j; ++i) {
      const double c = w.dot(v_basis[i]);
      h(i) += c;
      w -= c * v_basis[i];
    }
    h(j + 1) = w.norm();
    const bool breakdown = h(j + 1) <= 1e-14 * (std::abs(h(j)) + beta);

    for (int i = 0; i < j; ++i) {
      const double t = giv_c[i] * h(i) + giv_s[i] * h(i + 1);
      h(i + 1) = -giv_s[i] * h(i) + giv_c[i] * h(i + 1);
      h(i) = t;
    }
    const double denom = std::hypot(h(j), h(j + 1));
    const double c = denom > 0 ? h(j) / denom : 1.0;
    const double s = denom > 0 ? h(j + 1) / denom : 0.0;
    giv_c.push_back(c);
    giv_s.push_back(s);
    h(j) = denom;
    h(j + 1) = 0.0;
    r_cols.push_back(h.head(j + 1));

    g.conservativeResize(j + 2);
    g(j + 1) = -s * g(j);
    g(j) = c * g(j);
    const double resnorm = std::abs(g(j + 1));

    bool have_iterate = false;
    auto iterate = [&]() -> const VectorXd& {
      if (!have_iterate) {
        cached_iterate = form_iterate(j + 1);
        have_iterate = true;
      }
      return cached_iterate;
    };

    MonitorDecision dec = monitor(j + 1, resnorm, iterate);
    trace.records.push_back({j + 1, resnorm, dec.metric});
    trace.iterations = j + 1;
    if (dec.stop) {
      trace.converged = true;
      stopped = true;
    } else if (breakdown) {
      // invariant Krylov subspace: the iterate is exact up to roundoff,
      // re-check the monitor on it before giving up
      MonitorDecision final_dec = monitor(j + 1, resnorm, iterate);
      trace.converged = final_dec.stop;
      stopped = true;
    }

    if (!stopped) v_basis.push_back(w / h(j + 1));
  }

  VectorXd solution = trace.iterations > 0 ? form_iterate(trace.iterations) : x;
  return {solution, trace};
}

}  // namespace ddlab
