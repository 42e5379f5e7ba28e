#pragma once

#include "ddlab/gmres.hpp"
#include "ddlab/linear_system.hpp"
#include "ddlab/mesh.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ddlab {

/// Plain-text mesh dump: `vertices N / triangles M / facets F` header, then
/// one entity per line.
void dump_mesh(const Mesh& mesh, std::ostream& out);

/// MatrixMarket coordinate format, 17 significant digits.
void write_matrix_market(const SparseMat& mat, std::ostream& out);

void write_partition_csv(const std::vector<int>& element_owner, std::ostream& out);

void write_trace_csv(const KrylovTrace& trace, std::ostream& out);

/// Flat key=value config, one key per line, '#' comments.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> load_config(const std::string& path);

std::string format_double(double v);  // round-trip exact (17 significant digits)

}  // namespace ddlab
