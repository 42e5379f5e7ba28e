#pragma once

#include "ddlab/coarse.hpp"
#include "ddlab/gmres.hpp"
#include "ddlab/schwarz.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddlab {

struct ScheduleEntry {
  int resolution = 0;
  int n_subdomains = 1;
};

struct PrecondRequest {
  SchwarzFamily family = SchwarzFamily::MRAS;
  InterfaceCondition interface = InterfaceCondition::NVTF;
  std::string label;  // table-style, e.g. "NVTF-MRAS"
};

/// "oras", "soras", or "<ic>-<mras|smras>" (bare "mras"/"smras" pick
/// NVTF/NDTNS by equation type).
PrecondRequest parse_precond(const std::string& name, bool stokes);

struct ExperimentSpec {
  std::string case_name = "cavity";
  Scheme scheme = Scheme::TaylorHood;
  int degree = 2;
  std::vector<ScheduleEntry> schedule;
  int overlap = 1;  // width-2 overlap (two layers of mesh size h)
  std::vector<PrecondRequest> preconditioners;
  std::vector<int> coarse_sizes = {0};  // 0: one-level
  PartitionMethod partition = PartitionMethod::Graph;
  uint64_t seed = 1;
  int maxit = 1000;
  double tolerance = 1e-6;
  double tau = 10.0;
  double robin_alpha = 10.0;
  std::string out_dir;  // empty: no files written
  bool dump_mesh = false;
  bool dump_system = false;
  bool dump_partition = false;
  bool dump_spectrum = false;
  std::map<std::string, std::string> config_echo;  // full config of the run
  std::map<std::string, std::string> material_overrides;
};

struct ReportRow {
  int dof = 0;
  int n_subdomains = 0;
  std::string method;
  std::string coarse_label;             // "one-level" or "two-level(M)"
  std::optional<int> iterations;        // nullopt: did not converge within maxit
  int maxit = 1000;
  double wall_seconds = 0;
  double rel_error = 0;                 // ||U - U_m|| / ||U - U_0||
  double residual = 0;                  // ||A U_m - F|| / ||F||
  uint64_t seed = 0;
  std::string config;

  std::string iterations_label() const;  // ">1000"-style when not converged
};

struct RunResult {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;  // reference-solve costs, schedule diagnostics
};

/// Weak-scaling driver: per (resolution, N) builds the mesh, space, global
/// system and the direct reference solution, then runs every requested
/// preconditioner x coarse size through GMRES with the error-based stopping
/// rule. Failures of a single row are recorded as notes, not fatal.
RunResult run_experiment(const ExperimentSpec& spec);

std::string emit_report_csv(const RunResult& result);
std::string emit_report_markdown(const RunResult& result);
std::vector<ReportRow> parse_report_csv(const std::string& text);

struct VerifyResult {
  double rel_error = 0;
  double residual = 0;
};

/// ||U_ref - cand|| / ||U_ref - x0|| and ||A cand - F|| / ||F||.
VerifyResult verify_solution(const LinearSystem& system, const Eigen::VectorXd& candidate,
                             const Eigen::VectorXd& reference, const Eigen::VectorXd& x0);

/// Applies material.<region>.{E,poisson} overrides to an elasticity test case.
void apply_material_overrides(TestCase& tc, const std::map<std::string, std::string>& overrides);

}  // namespace ddlab
