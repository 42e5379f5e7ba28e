#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

namespace ddlab {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct KrylovRecord {
  int iteration = 0;
  double residual_norm = 0;                  // preconditioned residual
  std::optional<double> error_norm;          // set by error-based monitors
};

struct KrylovTrace {
  std::vector<KrylovRecord> records;
  bool converged = false;
  int iterations = 0;
};

/// Decides convergence once per iteration. `iterate` materialises the current
/// iterate on demand (an O(m n) triangular solve plus a gemv); the returned
/// metric, if any, is recorded in the trace.
struct MonitorDecision {
  bool stop = false;
  std::optional<double> metric;
};
using StopMonitor =
    std::function<MonitorDecision(int iteration, double residual_norm,
                                  const std::function<const Eigen::VectorXd&()>& iterate)>;

/// ||b - A x||/||b - A x0|| <= rtol, using the (preconditioned) residual that
/// full GMRES minimises.
StopMonitor residual_monitor(double rtol);

/// Error against a precomputed direct solution:
/// ||u_ref - x_m|| / ||u_ref - x0|| < tol.
StopMonitor error_monitor(const Eigen::VectorXd& u_ref, const Eigen::VectorXd& x0, double tol);

/// Full (non-restarted) right-preconditioned GMRES. apply_m_inv may be null
/// for the unpreconditioned iteration. Residual norms are non-increasing by
/// construction; iterations stop at maxit with converged=false.
std::pair<Eigen::VectorXd, KrylovTrace> gmres(const LinearOperator& apply_a,
                                              const LinearOperator& apply_m_inv,
                                              const Eigen::VectorXd& b,
                                              const Eigen::VectorXd& x0,
                                              const StopMonitor& monitor, int maxit);

}  // namespace ddlab
