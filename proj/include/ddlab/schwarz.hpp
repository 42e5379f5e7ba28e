#pragma once

#include "ddlab/assembly.hpp"
#include "ddlab/decomposition.hpp"
#include "ddlab/factorization.hpp"

#include <limits>
#include <optional>
#include <string>

namespace ddlab {

enum class SchwarzFamily { ORAS, SORAS, MRAS, SMRAS };

const char* to_string(SchwarzFamily f);
bool is_symmetrized(SchwarzFamily f);

/// Coarse-space selection: the smallest M eigenvalues per subdomain (the
/// tables' rule) or every eigenvalue below a threshold theta.
struct CoarseSpec {
  enum class Selection { FixedCount, Threshold };
  Selection selection = Selection::FixedCount;
  int count = 3;
  double theta = 0.0;
  double shift = std::numeric_limits<double>::quiet_NaN();  // NaN: eigensolver default
};

struct PreconditionerSpec {
  SchwarzFamily family = SchwarzFamily::MRAS;
  InterfaceCondition interface = InterfaceCondition::NVTF;
  double robin_alpha = 10.0;
  int levels = 1;
  std::optional<CoarseSpec> coarse;

  /// Table-style label, e.g. "ORAS" or "NVTF-MRAS".
  std::string name() const;
};

/// ORAS/SORAS must use Robin, MRAS/SMRAS one of the non-standard conditions
/// matching the equation (Stokes: TVNF/NVTF, elasticity: TDNNS/NDTNS).
void validate_spec(const PreconditionerSpec& spec, const Problem& problem);

/// One-level Schwarz operator
///   MRAS/ORAS :  z = sum_i R_i^T D_i B_i^{-1} R_i r
///   SMRAS/SORAS: z = sum_i R_i^T D_i B_i^{-1} D_i R_i r
/// with B_i the subdomain matrix under the spec's interface condition. Local
/// solves run concurrently; the sum is accumulated in ascending subdomain
/// order, so applications are bitwise reproducible.
class OneLevelPreconditioner {
 public:
  OneLevelPreconditioner() = default;

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

  SchwarzFamily family() const { return family_; }
  int system_size() const { return system_size_; }
  int physical_size() const { return phys_size_; }
  const Decomposition& decomposition() const { return *decomp_; }
  const LinearSystem& local_system(int i) const { return locals_[i].system; }

  /// B_i^{-1} applied to one subdomain residual (standard frame in/out).
  Eigen::VectorXd local_solve(int i, const Eigen::VectorXd& r_local) const;

 private:
  friend OneLevelPreconditioner build_one_level(const PreconditionerSpec&, const Decomposition&,
                                                const Space&, const Problem&,
                                                const AssemblyOptions&, int);
  struct Local {
    LinearSystem system;
    std::optional<Factorization> lu;
  };
  std::vector<Local> locals_;
  const Decomposition* decomp_ = nullptr;
  SchwarzFamily family_ = SchwarzFamily::MRAS;
  int phys_size_ = 0;
  int system_size_ = 0;
};

/// Assembles and factorises every B_i. `system_size` is the global system
/// dimension (physical dofs plus the mean-pressure row when present); the
/// augmentation component of a residual passes through the preconditioner
/// unchanged. Singular local matrices fail loudly with the subdomain index.
OneLevelPreconditioner build_one_level(const PreconditionerSpec& spec,
                                       const Decomposition& decomp, const Space& space,
                                       const Problem& problem, const AssemblyOptions& options,
                                       int system_size);

}  // namespace ddlab
