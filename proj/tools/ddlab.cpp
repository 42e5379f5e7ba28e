// Command-line driver for the domain-decomposition laboratory.
//
// Example:
//   printf '10 4\n14 8\n20 16\n' > schedule.txt
//   ddlab run --case l_shape_elasticity --scheme th --degree 3 \
//         --schedule schedule.txt --precond oras,ndtns-mras,ndtns-smras \
//         --coarse 0,3,5 --overlap 1 --seed 42 --out results/
//
// Writes report.csv (long form), report.md (paper-style pivot table) and
// per-row convergence traces into the output directory.

#include "ddlab/harness.hpp"
#include "ddlab/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ddlab;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<ScheduleEntry> load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::vector<ScheduleEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    ScheduleEntry e;
    if (ls >> e.resolution >> e.n_subdomains) entries.push_back(e);
  }
  if (entries.empty()) throw std::runtime_error("schedule file has no (resolution, N) pairs");
  return entries;
}

int run_command(const std::map<std::string, std::string>& config) {
  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
  };

  ExperimentSpec spec;
  spec.case_name = get("case", "cavity");
  const std::string scheme = get("scheme", "th");
  if (scheme == "th")
    spec.scheme = Scheme::TaylorHood;
  else if (scheme == "hdg")
    spec.scheme = Scheme::HDG;
  else
    throw std::runtime_error("scheme must be 'th' or 'hdg'");
  spec.degree = std::stoi(get("degree", scheme == "hdg" ? "1" : "2"));
  spec.overlap = std::stoi(get("overlap", "1"));
  spec.seed = std::stoull(get("seed", "1"));
  spec.maxit = std::stoi(get("maxit", "1000"));
  spec.tolerance = std::stod(get("tol", "1e-6"));
  spec.tau = std::stod(get("tau", "10"));
  spec.robin_alpha = std::stod(get("alpha", "10"));
  spec.out_dir = get("out", "");
  spec.dump_mesh = get("dump_mesh", "0") == "1";
  spec.dump_system = get("dump_system", "0") == "1";
  spec.dump_partition = get("dump_partition", "0") == "1";
  spec.dump_spectrum = get("dump_spectrum", "0") == "1";
  const std::string partition = get("partition", "graph");
  if (partition == "graph")
    spec.partition = PartitionMethod::Graph;
  else if (partition == "uniform")
    spec.partition = PartitionMethod::UniformGrid;
  else
    throw std::runtime_error("partition must be 'graph' or 'uniform'");

  spec.schedule = load_schedule(get("schedule", ""));

  const TestCase probe = canonical_test_case(spec.case_name);
  const bool stokes = is_stokes(probe.problem);
  for (const std::string& p : split_list(get("precond", "")))
    spec.preconditioners.push_back(parse_precond(p, stokes));
  if (spec.preconditioners.empty())
    throw std::runtime_error("no preconditioners requested (--precond)");

  spec.coarse_sizes.clear();
  for (const std::string& c : split_list(get("coarse", "0")))
    spec.coarse_sizes.push_back(std::stoi(c));

  for (const auto& [k, v] : config)
    if (k.rfind("material.", 0) == 0) spec.material_overrides[k] = v;
  spec.config_echo = config;
  // echo the effective defaults too
  spec.config_echo["case"] = spec.case_name;
  spec.config_echo["scheme"] = scheme;
  spec.config_echo["degree"] = std::to_string(spec.degree);
  spec.config_echo["overlap"] = std::to_string(spec.overlap);
  spec.config_echo["seed"] = std::to_string(spec.seed);
  spec.config_echo["maxit"] = std::to_string(spec.maxit);
  spec.config_echo["tol"] = format_double(spec.tolerance);
  spec.config_echo["tau"] = format_double(spec.tau);
  spec.config_echo["alpha"] = format_double(spec.robin_alpha);
  spec.config_echo["partition"] = partition;

  RunResult result = run_experiment(spec);

  const std::string csv = emit_report_csv(result);
  const std::string md = emit_report_markdown(result);
  if (!spec.out_dir.empty()) {
    std::ofstream(spec.out_dir + "/report.csv") << csv;
    std::ofstream(spec.out_dir + "/report.md") << md;
    std::cout << md;
    std::cout << "\nreports written to " << spec.out_dir << "\n";
  } else {
    std::cout << csv << "\n" << md;
  }
  for (const std::string& n : result.notes) std::cerr << "note: " << n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D Stokes/elasticity domain-decomposition laboratory"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run a weak-scaling experiment");
  std::string case_name, scheme, schedule, precond, coarse, out, config_path, partition;
  int degree = -1, overlap = -1, maxit = -1;
  std::string seed, tol, tau, alpha;
  bool dmesh = false, dsystem = false, dpartition = false, dspectrum = false;

  run->add_option("--case", case_name,
                  "test case (l_shape_elasticity, hetero_beam, cavity, t_shape)");
  run->add_option("--scheme", scheme, "discretisation: th or hdg");
  run->add_option("--degree", degree, "polynomial degree (th: 2 or 3, hdg: 1)");
  run->add_option("--schedule", schedule, "file of 'resolution N' pairs");
  run->add_option("--precond", precond, "comma list, e.g. oras,soras,nvtf-mras");
  run->add_option("--coarse", coarse, "comma list of eigenvectors per subdomain (0 = one-level)");
  run->add_option("--overlap", overlap, "overlap layers l (width 2l)");
  run->add_option("--seed", seed, "seed for random initial guesses");
  run->add_option("--maxit", maxit, "GMRES iteration cap");
  run->add_option("--tol", tol, "relative error tolerance");
  run->add_option("--tau", tau, "hdG stabilisation parameter");
  run->add_option("--alpha", alpha, "Robin parameter of ORAS/SORAS");
  run->add_option("--partition", partition, "graph or uniform");
  run->add_option("--out", out, "output directory");
  run->add_option("--config", config_path, "key=value config file (flags win)");
  run->add_flag("--dump-mesh", dmesh, "write mesh.txt per cell");
  run->add_flag("--dump-system", dsystem, "write system.mtx per cell");
  run->add_flag("--dump-partition", dpartition, "write partition.csv per cell");
  run->add_flag("--dump-spectrum", dspectrum, "write GenEO spectra per subdomain");

  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = ddlab::load_config(config_path);
    auto set = [&](const std::string& k, const std::string& v) {
      if (!v.empty()) config[k] = v;
    };
    set("case", case_name);
    set("scheme", scheme);
    set("schedule", schedule);
    set("precond", precond);
    set("coarse", coarse);
    set("out", out);
    set("partition", partition);
    set("seed", seed);
    set("tol", tol);
    set("tau", tau);
    set("alpha", alpha);
    if (degree >= 0) config["degree"] = std::to_string(degree);
    if (overlap >= 0) config["overlap"] = std::to_string(overlap);
    if (maxit >= 0) config["maxit"] = std::to_string(maxit);
    if (dmesh) config["dump_mesh"] = "1";
    if (dsystem) config["dump_system"] = "1";
    if (dpartition) config["dump_partition"] = "1";
    if (dspectrum) config["dump_spectrum"] = "1";
    return run_command(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
