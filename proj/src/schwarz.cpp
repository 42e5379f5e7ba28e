#include "ddlab/schwarz.hpp"

#include "ddlab/parallel.hpp"
#include "ddlab/rng.hpp"

#include <stdexcept>

namespace ddlab {

const char* to_string(SchwarzFamily f) {
  switch (f) {
    case SchwarzFamily::ORAS: return "ORAS";
    case SchwarzFamily::SORAS: return "SORAS";
    case SchwarzFamily::MRAS: return "MRAS";
    case SchwarzFamily::SMRAS: return "SMRAS";
  }
  return "?";
}

bool is_symmetrized(SchwarzFamily f) {
  return f == SchwarzFamily::SORAS || f == SchwarzFamily::SMRAS;
}

std::string PreconditionerSpec::name() const {
  if (family == SchwarzFamily::ORAS || family == SchwarzFamily::SORAS)
    return to_string(family);
  std::string ic = to_string(interface);
  for (char& c : ic) c = static_cast<char>(std::toupper(c));
  return ic + "-" + to_string(family);
}

void validate_spec(const PreconditionerSpec& spec, const Problem& problem) {
  const bool robin_family =
      spec.family == SchwarzFamily::ORAS || spec.family == SchwarzFamily::SORAS;
  if (robin_family) {
    if (spec.interface != InterfaceCondition::Robin)
      throw std::invalid_argument("PreconditionerSpec: " + spec.name() +
                                  " requires Robin interface conditions");
    return;
  }
  const bool stokes = is_stokes(problem);
  const bool stokes_ic =
      spec.interface == InterfaceCondition::TVNF || spec.interface == InterfaceCondition::NVTF;
  const bool elast_ic =
      spec.interface == InterfaceCondition::TDNNS || spec.interface == InterfaceCondition::NDTNS;
  if (!(stokes ? stokes_ic : elast_ic))
    throw std::invalid_argument(std::string("PreconditionerSpec: interface condition ") +
                                to_string(spec.interface) +
                                (stokes ? " does not apply to Stokes"
                                        : " does not apply to elasticity"));
}

Eigen::VectorXd OneLevelPreconditioner::local_solve(int i,
                                                    const Eigen::VectorXd& r_local) const {
  const Local& loc = locals_[i];
  Eigen::VectorXd u = r_local;
  loc.system.to_system_frame(u);
  if (loc.system.A.blocks.augmented) {
    Eigen::VectorXd padded(u.size() + 1);
    padded.head(u.size()) = u;
    padded(u.size()) = 0.0;
    padded = loc.lu->solve(padded);
    u = padded.head(u.size());
  } else {
    u = loc.lu->solve(u);
  }
  loc.system.from_system_frame(u);
  return u;
}

Eigen::VectorXd OneLevelPreconditioner::apply(const Eigen::VectorXd& r) const {
  if (r.size() != system_size_)
    throw std::invalid_argument("OneLevelPreconditioner::apply: dimension mismatch");
  const int n = decomp_->n_subdomains;
  const bool sym = is_symmetrized(family_);

  std::vector<Eigen::VectorXd> contrib(n);
  parallel_for(n, [&](int i) {
    Eigen::VectorXd ri = decomp_->restrict_to(i, r);
    if (sym) ri.array() *= decomp_->pu_weights[i].array();
    Eigen::VectorXd zi = local_solve(i, ri);
    zi.array() *= decomp_->pu_weights[i].array();
    contrib[i] = std::move(zi);
  });

  Eigen::VectorXd z = Eigen::VectorXd::Zero(system_size_);
  for (int i = 0; i < n; ++i) decomp_->extend_add(i, contrib[i], z);
  if (system_size_ > phys_size_) z(phys_size_) = r(phys_size_);  // mean-pressure row
  return z;
}

OneLevelPreconditioner build_one_level(const PreconditionerSpec& spec,
                                       const Decomposition& decomp, const Space& space,
                                       const Problem& problem, const AssemblyOptions& options,
                                       int system_size) {
  validate_spec(spec, problem);
  if (system_size != space.total_dofs && system_size != space.total_dofs + 1)
    throw std::invalid_argument("build_one_level: system size does not match the space");

  OneLevelPreconditioner pc;
  pc.decomp_ = &decomp;
  pc.family_ = spec.family;
  pc.phys_size_ = space.total_dofs;
  pc.system_size_ = system_size;
  pc.locals_.resize(decomp.n_subdomains);

  AssemblyOptions local_opts = options;
  local_opts.robin_alpha = spec.robin_alpha;

  parallel_for(decomp.n_subdomains, [&](int i) {
    auto& loc = pc.locals_[i];
    loc.system = assemble_local(space, problem, decomp.overlapped_elements[i],
                                decomp.dof_sets[i], spec.interface, local_opts);
    try {
      loc.lu.emplace(loc.system.A);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("build_one_level: B_" + std::to_string(i) +
                                " is singular under " + to_string(spec.interface) +
                                " interface conditions (" + e.what() + ")");
    }
    // cheap near-singularity probe: a direct solve must reproduce a random rhs
    Rng rng(0xb0b0b0b0ULL + static_cast<uint64_t>(i));
    Eigen::VectorXd b = rng.vector(loc.system.size());
    Eigen::VectorXd x = loc.lu->solve(b);
    const double resid = (loc.system.A.mat * x - b).norm() / b.norm();
    if (!(resid < 1e-6))
      throw SingularMatrixError("build_one_level: B_" + std::to_string(i) +
                                " is numerically singular (probe residual " +
                                std::to_string(resid) + ")");
  });
  return pc;
}

}  // namespace ddlab
