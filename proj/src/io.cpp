#include "ddlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ddlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_mesh(const Mesh& mesh, std::ostream& out) {
  out << "vertices " << mesh.num_vertices() << " / triangles " << mesh.num_triangles()
      << " / facets " << mesh.num_facets() << "\n";
  for (const Vec2& v : mesh.vertices)
    out << "v " << format_double(v.x()) << " " << format_double(v.y()) << "\n";
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangles[k];
    out << "t " << t[0] << " " << t[1] << " " << t[2] << " region " << mesh.region_tags[k]
        << "\n";
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facets[f];
    out << "f " << fc.v0 << " " << fc.v1 << " tri " << fc.tri_in << " " << fc.tri_out;
    auto it = mesh.boundary_tags.find(f);
    if (it != mesh.boundary_tags.end()) out << " tag " << it->second;
    out << "\n";
  }
}

void write_matrix_market(const SparseMat& mat, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
  for (int k = 0; k < mat.outerSize(); ++k)
    for (SparseMat::InnerIterator it(mat, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << format_double(it.value()) << "\n";
}

void write_partition_csv(const std::vector<int>& element_owner, std::ostream& out) {
  out << "triangle,owner\n";
  for (size_t k = 0; k < element_owner.size(); ++k) out << k << "," << element_owner[k] << "\n";
}

void write_trace_csv(const KrylovTrace& trace, std::ostream& out) {
  out << "iteration,residual_norm,error\n";
  for (const KrylovRecord& r : trace.records) {
    out << r.iteration << "," << format_double(r.residual_norm) << ",";
    if (r.error_norm) out << format_double(*r.error_norm);
    out << "\n";
  }
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const char* ws = " \t\r\n";
      const size_t a = s.find_first_not_of(ws);
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(ws);
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    config[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return config;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace ddlab
