#include "ddlab/harness.hpp"

#include "ddlab/factorization.hpp"
#include "ddlab/io.hpp"
#include "ddlab/rng.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddlab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

std::string coarse_label_of(int m) {
  return m == 0 ? "one-level" : "two-level(" + std::to_string(m) + ")";
}

InterfaceCondition parse_interface(const std::string& s) {
  if (s == "tvnf") return InterfaceCondition::TVNF;
  if (s == "nvtf") return InterfaceCondition::NVTF;
  if (s == "tdnns") return InterfaceCondition::TDNNS;
  if (s == "ndtns") return InterfaceCondition::NDTNS;
  if (s == "robin") return InterfaceCondition::Robin;
  throw std::invalid_argument("unknown interface condition '" + s + "'");
}

std::string serialize_config(const std::map<std::string, std::string>& config) {
  std::string out;
  for (const auto& [k, v] : config) {
    if (!out.empty()) out += ";";
    out += k + "=" + v;
  }
  return out;
}

}  // namespace

PrecondRequest parse_precond(const std::string& raw, bool stokes) {
  const std::string name = lower(raw);
  PrecondRequest req;
  if (name == "oras" || name == "soras") {
    req.family = name == "oras" ? SchwarzFamily::ORAS : SchwarzFamily::SORAS;
    req.interface = InterfaceCondition::Robin;
  } else {
    std::string fam = name, ic;
    if (const size_t dash = name.find('-'); dash != std::string::npos) {
      ic = name.substr(0, dash);
      fam = name.substr(dash + 1);
    }
    if (fam == "mras")
      req.family = SchwarzFamily::MRAS;
    else if (fam == "smras")
      req.family = SchwarzFamily::SMRAS;
    else
      throw std::invalid_argument("unknown preconditioner '" + raw + "'");
    req.interface = ic.empty()
                        ? (stokes ? InterfaceCondition::NVTF : InterfaceCondition::NDTNS)
                        : parse_interface(ic);
  }
  PreconditionerSpec ps;
  ps.family = req.family;
  ps.interface = req.interface;
  req.label = ps.name();
  return req;
}

std::string ReportRow::iterations_label() const {
  return iterations ? std::to_string(*iterations) : ">" + std::to_string(maxit);
}

void apply_material_overrides(TestCase& tc, const std::map<std::string, std::string>& overrides) {
  auto* elast = std::get_if<ElasticityProblem>(&tc.problem);
  for (const auto& [key, value] : overrides) {
    if (key.rfind("material.", 0) != 0) continue;
    if (!elast)
      throw std::invalid_argument("material overrides only apply to elasticity cases");
    const size_t dot = key.find('.', 9);
    if (dot == std::string::npos)
      throw std::invalid_argument("bad material key '" + key + "'");
    const int region = std::stoi(key.substr(9, dot - 9));
    const std::string field = key.substr(dot + 1);
    Material& m = elast->materials[region];
    if (field == "E")
      m.young = std::stod(value);
    else if (field == "poisson")
      m.poisson = std::stod(value);
    else
      throw std::invalid_argument("bad material field '" + field + "'");
  }
}

VerifyResult verify_solution(const LinearSystem& system, const Eigen::VectorXd& candidate,
                             const Eigen::VectorXd& reference, const Eigen::VectorXd& x0) {
  if (candidate.size() != reference.size() || candidate.size() != system.size())
    throw std::invalid_argument("verify_solution: dimension mismatch");
  const double denom = (reference - x0).norm();
  VerifyResult v;
  v.rel_error = (reference - candidate).norm() / (denom > 0 ? denom : 1.0);
  const double fnorm = system.F.norm();
  v.residual = (system.A.mat * candidate - system.F).norm() / (fnorm > 0 ? fnorm : 1.0);
  return v;
}

RunResult run_experiment(const ExperimentSpec& spec) {
  if (spec.schedule.empty()) throw std::invalid_argument("run_experiment: empty schedule");
  if (spec.preconditioners.empty())
    throw std::invalid_argument("run_experiment: no preconditioners requested");

  TestCase tc = canonical_test_case(spec.case_name);
  apply_material_overrides(tc, spec.material_overrides);
  const std::string config = serialize_config(spec.config_echo);

  RunResult result;
  const bool write_files = !spec.out_dir.empty();
  if (write_files) fs::create_directories(spec.out_dir);

  // weak-scaling integrity: elements per subdomain should stay ~constant
  {
    double lo = 1e300, hi = 0;
    for (const ScheduleEntry& e : spec.schedule) {
      Mesh probe = build_structured_mesh(tc.shape, e.resolution);
      const double per = static_cast<double>(probe.num_triangles()) / e.n_subdomains;
      lo = std::min(lo, per);
      hi = std::max(hi, per);
    }
    std::ostringstream note;
    note << "schedule: elements/subdomain in [" << lo << ", " << hi << "]"
         << (hi > 1.2 * lo ? " (varies by more than 20%)" : "");
    result.notes.push_back(note.str());
  }

  int row_index = 0;
  const int max_coarse =
      *std::max_element(spec.coarse_sizes.begin(), spec.coarse_sizes.end());

  for (size_t cell = 0; cell < spec.schedule.size(); ++cell) {
    const ScheduleEntry& entry = spec.schedule[cell];
    const Mesh mesh = build_structured_mesh(tc.shape, entry.resolution);
    const Space space = build_space(mesh, spec.scheme, spec.degree);

    AssemblyOptions options;
    options.tau = spec.tau;
    options.robin_alpha = spec.robin_alpha;

    const LinearSystem system = spec.scheme == Scheme::TaylorHood
                                    ? assemble_taylor_hood(space, tc.problem, options)
                                    : assemble_hdg(space, tc.problem, options);

    const auto t_ref = Clock::now();
    const Factorization direct(system.A);
    const Eigen::VectorXd u_ref = direct.solve(system.F);
    const double ref_seconds = seconds_since(t_ref);

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(system.size());
    if (tc.initial_guess == InitialGuessRule::Random) {
      Rng rng(spec.seed + 0x1000 * static_cast<uint64_t>(cell));
      x0 = rng.vector(system.size());
      if (system.A.blocks.augmented) x0(system.size() - 1) = 0.0;
    }

    const Decomposition decomp =
        build_decomposition(mesh, space, entry.n_subdomains, spec.overlap, spec.partition);

    {
      std::ostringstream note;
      note << "cell res=" << entry.resolution << " N=" << entry.n_subdomains
           << ": dof=" << system.size() << ", elements/subdomain="
           << static_cast<double>(mesh.num_triangles()) / entry.n_subdomains
           << ", reference direct solve " << ref_seconds << " s";
      result.notes.push_back(note.str());
    }

    std::string cell_dir;
    if (write_files) {
      cell_dir = spec.out_dir + "/cell_res" + std::to_string(entry.resolution) + "_N" +
                 std::to_string(entry.n_subdomains);
      fs::create_directories(cell_dir);
      if (spec.dump_mesh) {
        std::ofstream out(cell_dir + "/mesh.txt");
        dump_mesh(mesh, out);
      }
      if (spec.dump_partition) {
        std::ofstream out(cell_dir + "/partition.csv");
        write_partition_csv(decomp.element_owner, out);
      }
      if (spec.dump_system) {
        std::ofstream out(cell_dir + "/system.mtx");
        write_matrix_market(system.A.mat, out);
      }
    }

    std::map<InterfaceCondition, std::vector<std::vector<GeneralizedEigenPair>>> geneo_cache;

    for (const PrecondRequest& req : spec.preconditioners) {
      PreconditionerSpec pspec;
      pspec.family = req.family;
      pspec.interface = req.interface;
      pspec.robin_alpha = spec.robin_alpha;

      std::optional<OneLevelPreconditioner> one_level;
      try {
        const auto t0 = Clock::now();
        one_level = build_one_level(pspec, decomp, space, tc.problem, options, system.size());
        std::ostringstream note;
        note << req.label << " N=" << entry.n_subdomains << ": local factorisations "
             << seconds_since(t0) << " s";
        result.notes.push_back(note.str());
      } catch (const std::exception& e) {
        result.notes.push_back("row skipped (" + req.label + ", N=" +
                               std::to_string(entry.n_subdomains) + "): " + e.what());
        continue;
      }

      for (int m : spec.coarse_sizes) {
        const auto t_row = Clock::now();
        ReportRow row;
        row.dof = system.size();
        row.n_subdomains = entry.n_subdomains;
        row.method = req.label;
        row.coarse_label = coarse_label_of(m);
        row.maxit = spec.maxit;
        row.seed = spec.seed;
        row.config = config;

        try {
          std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_m;
          std::optional<CoarseSpace> coarse;
          if (m == 0) {
            apply_m = [&pc = *one_level](const Eigen::VectorXd& r) { return pc.apply(r); };
          } else {
            CoarseSpec cspec;
            cspec.selection = CoarseSpec::Selection::FixedCount;
            cspec.count = m;
            auto it = geneo_cache.find(req.interface);
            if (it == geneo_cache.end()) {
              CoarseSpec request = cspec;
              request.count = max_coarse;
              it = geneo_cache
                       .emplace(req.interface, solve_geneo_all(decomp, space, tc.problem, pspec,
                                                               request, options))
                       .first;
              if (write_files && spec.dump_spectrum) {
                for (int j = 0; j < decomp.n_subdomains; ++j) {
                  std::ofstream out(cell_dir + "/spectrum_" + to_string(req.interface) + "_" +
                                    std::to_string(j) + ".csv");
                  out << "subdomain,index,lambda\n";
                  for (size_t k = 0; k < it->second[j].size(); ++k)
                    out << j << "," << k << ","
                        << format_double(it->second[j][k].lambda.real()) << "\n";
                }
              }
            }
            coarse = build_coarse_space(system.A, decomp, it->second, cspec);
            apply_m = [pc = TwoLevelPreconditioner(*one_level, *coarse)](
                          const Eigen::VectorXd& r) { return pc.apply(r); };
          }

          auto apply_a = [&system](const Eigen::VectorXd& v) {
            return (system.A.mat * v).eval();
          };
          auto [solution, trace] = gmres(apply_a, apply_m, system.F, x0,
                                         error_monitor(u_ref, x0, spec.tolerance), spec.maxit);
          row.iterations = trace.converged ? std::optional<int>(trace.iterations) : std::nullopt;
          const VerifyResult v = verify_solution(system, solution, u_ref, x0);
          row.rel_error = v.rel_error;
          row.residual = v.residual;
          row.wall_seconds = seconds_since(t_row);

          if (write_files) {
            std::ofstream out(spec.out_dir + "/trace_" + std::to_string(row_index) + ".csv");
            write_trace_csv(trace, out);
          }
          result.rows.push_back(std::move(row));
          ++row_index;
        } catch (const std::exception& e) {
          result.notes.push_back("row failed (" + req.label + ", " + coarse_label_of(m) +
                                 ", N=" + std::to_string(entry.n_subdomains) + "): " + e.what());
        }
      }
    }
  }
  return result;
}

std::string emit_report_csv(const RunResult& result) {
  std::ostringstream out;
  if (!result.rows.empty() && !result.rows.front().config.empty())
    out << "# config: " << result.rows.front().config << "\n";
  for (const std::string& n : result.notes) out << "# note: " << n << "\n";
  out << "dof,N,method,coarse,iterations,maxit,wall_seconds,rel_error,residual,seed\n";
  for (const ReportRow& r : result.rows) {
    out << r.dof << "," << r.n_subdomains << "," << r.method << "," << r.coarse_label << ","
        << r.iterations_label() << "," << r.maxit << "," << format_double(r.wall_seconds) << ","
        << format_double(r.rel_error) << "," << format_double(r.residual) << "," << r.seed
        << "\n";
  }
  return out.str();
}

std::string emit_report_markdown(const RunResult& result) {
  // paper-style pivot: one column per method/coarse combination
  std::vector<std::string> columns;
  std::vector<std::pair<int, int>> cells;  // (dof, N) in order of appearance
  for (const ReportRow& r : result.rows) {
    const std::string col = r.method + " " + r.coarse_label;
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    const std::pair<int, int> cell{r.dof, r.n_subdomains};
    if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
  }
  std::ostringstream out;
  out << "| DOF | N |";
  for (const std::string& c : columns) out << " " << c << " |";
  out << "\n|---|---|";
  for (size_t i = 0; i < columns.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& [dof, n] : cells) {
    out << "| " << dof << " | " << n << " |";
    for (const std::string& c : columns) {
      std::string value;
      for (const ReportRow& r : result.rows)
        if (r.dof == dof && r.n_subdomains == n && r.method + " " + r.coarse_label == c)
          value = r.iterations_label();
      out << " " << (value.empty() ? "-" : value) << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line, config;
  std::vector<ReportRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config: ", 0) == 0) {
      config = line.substr(10);
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw std::runtime_error("parse_report_csv: bad row: " + line);
    ReportRow r;
    r.dof = std::stoi(fields[0]);
    r.n_subdomains = std::stoi(fields[1]);
    r.method = fields[2];
    r.coarse_label = fields[3];
    if (!fields[4].empty() && fields[4][0] == '>')
      r.iterations = std::nullopt;
    else
      r.iterations = std::stoi(fields[4]);
    r.maxit = std::stoi(fields[5]);
    r.wall_seconds = std::stod(fields[6]);
    r.rel_error = std::stod(fields[7]);
    r.residual = std::stod(fields[8]);
    r.seed = std::stoull(fields[9]);
    r.config = config;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ddlab
