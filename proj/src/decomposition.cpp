#include "ddlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ddlab {

namespace {

std::pair<Vec2, Vec2> bounding_box(const Mesh& mesh, const std::vector<int>& elements) {
  Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
  for (int k : elements) {
    Vec2 c = mesh.triangle_centroid(k);
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  return {lo, hi};
}

std::vector<int> uniform_grid_partition(const Mesh& mesh, int n) {
  // grid factorisation keeping subdomain cells as square as possible
  Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
  for (const Vec2& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double w = hi.x() - lo.x(), h = hi.y() - lo.y();
  int best_a = 0, best_b = 0;
  double best_aspect = 1e300;
  for (int a = 1; a <= n; ++a) {
    if (n % a != 0) continue;
    const int b = n / a;
    const double cw = w / a, ch = h / b;
    const double aspect = std::max(cw / ch, ch / cw);
    if (aspect < best_aspect) {
      best_aspect = aspect;
      best_a = a;
      best_b = b;
    }
  }
  std::vector<int> owner(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    Vec2 c = mesh.triangle_centroid(k);
    int i = std::min(best_a - 1, static_cast<int>((c.x() - lo.x()) / w * best_a));
    int j = std::min(best_b - 1, static_cast<int>((c.y() - lo.y()) / h * best_b));
    owner[k] = j * best_a + i;
  }
  std::vector<int> counts(n, 0);
  for (int o : owner) ++counts[o];
  for (int i = 0; i < n; ++i)
    if (counts[i] == 0)
      throw std::invalid_argument(
          "partition_elements: uniform_grid bin " + std::to_string(i) +
          " is empty for this domain; use the graph method or a compatible N");
  return owner;
}

void rcb(const Mesh& mesh, std::vector<int>& indices, int parts, int label,
         std::vector<int>& owner) {
  if (parts == 1) {
    for (int k : indices) owner[k] = label;
    return;
  }
  const int p1 = parts / 2, p2 = parts - p1;
  auto [lo, hi] = bounding_box(mesh, indices);
  const int axis = (hi.x() - lo.x()) >= (hi.y() - lo.y()) ? 0 : 1;
  const size_t cut = indices.size() * p1 / parts;
  std::nth_element(indices.begin(), indices.begin() + cut, indices.end(), [&](int a, int b) {
    const double ca = mesh.triangle_centroid(a)[axis], cb = mesh.triangle_centroid(b)[axis];
    if (ca != cb) return ca < cb;
    return a < b;  // deterministic tie-break
  });
  std::vector<int> left(indices.begin(), indices.begin() + cut);
  std::vector<int> right(indices.begin() + cut, indices.end());
  rcb(mesh, left, p1, label, owner);
  rcb(mesh, right, p2, label + p1, owner);
}

/// Edge-connected components of one subdomain's element set.
std::vector<std::vector<int>> components(const Mesh& mesh, const std::vector<int>& owner,
                                         int part) {
  std::vector<int> mine;
  for (int k = 0; k < mesh.num_triangles(); ++k)
    if (owner[k] == part) mine.push_back(k);
  std::vector<char> seen(mesh.num_triangles(), 0);
  std::vector<std::vector<int>> comps;
  for (int seed : mine) {
    if (seen[seed]) continue;
    std::vector<int> comp;
    std::deque<int> queue{seed};
    seen[seed] = 1;
    while (!queue.empty()) {
      int k = queue.front();
      queue.pop_front();
      comp.push_back(k);
      for (int f : mesh.triangle_facets[k]) {
        const Facet& fc = mesh.facets[f];
        int other = fc.tri_in == k ? fc.tri_out : fc.tri_in;
        if (other >= 0 && owner[other] == part && !seen[other]) {
          seen[other] = 1;
          queue.push_back(other);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

/// Re-attach disconnected fragments to the neighbouring part that shares the
/// most edges with them.
void smooth_connectivity(const Mesh& mesh, std::vector<int>& owner, int n) {
  for (int pass = 0; pass < 2 * n; ++pass) {
    bool changed = false;
    for (int part = 0; part < n; ++part) {
      auto comps = components(mesh, owner, part);
      if (comps.size() <= 1) continue;
      // keep the largest component (ties: the one with the smallest element)
      size_t keep = 0;
      for (size_t c = 1; c < comps.size(); ++c) {
        if (comps[c].size() > comps[keep].size() ||
            (comps[c].size() == comps[keep].size() &&
             *std::min_element(comps[c].begin(), comps[c].end()) <
                 *std::min_element(comps[keep].begin(), comps[keep].end())))
          keep = c;
      }
      for (size_t c = 0; c < comps.size(); ++c) {
        if (c == keep) continue;
        std::vector<int> votes(n, 0);
        for (int k : comps[c])
          for (int f : mesh.triangle_facets[k]) {
            const Facet& fc = mesh.facets[f];
            int other = fc.tri_in == k ? fc.tri_out : fc.tri_in;
            if (other >= 0 && owner[other] != part) ++votes[owner[other]];
          }
        int target = static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                                      votes.begin());
        if (votes[target] == 0) continue;  // landlocked fragment, next pass
        for (int k : comps[c]) owner[k] = target;
        changed = true;
      }
    }
    if (!changed) return;
  }
}

}  // namespace

Eigen::VectorXd Decomposition::restrict_to(int i, const Eigen::VectorXd& global) const {
  const auto& dofs = dof_sets[i];
  Eigen::VectorXd out(dofs.size());
  for (size_t a = 0; a < dofs.size(); ++a) out(a) = global(dofs[a]);
  return out;
}

void Decomposition::extend_add(int i, const Eigen::VectorXd& local,
                               Eigen::VectorXd& global) const {
  const auto& dofs = dof_sets[i];
  for (size_t a = 0; a < dofs.size(); ++a) global(dofs[a]) += local(a);
}

std::vector<int> partition_elements(const Mesh& mesh, int n, PartitionMethod method) {
  if (n < 1) throw std::invalid_argument("partition_elements: need at least one subdomain");
  if (n > mesh.num_triangles())
    throw std::invalid_argument("partition_elements: more subdomains than elements");
  if (n == 1) return std::vector<int>(mesh.num_triangles(), 0);

  if (method == PartitionMethod::UniformGrid) return uniform_grid_partition(mesh, n);

  std::vector<int> owner(mesh.num_triangles(), -1);
  std::vector<int> indices(mesh.num_triangles());
  std::iota(indices.begin(), indices.end(), 0);
  rcb(mesh, indices, n, 0, owner);
  smooth_connectivity(mesh, owner, n);
  return owner;
}

std::vector<std::vector<int>> expand_overlap(const Mesh& mesh,
                                             const std::vector<int>& element_owner, int l) {
  if (l < 0) throw std::invalid_argument("expand_overlap: l must be >= 0");
  const int n = *std::max_element(element_owner.begin(), element_owner.end()) + 1;

  // vertex -> incident triangles
  std::vector<std::vector<int>> star(mesh.num_vertices());
  for (int k = 0; k < mesh.num_triangles(); ++k)
    for (int v : mesh.triangles[k]) star[v].push_back(k);

  std::vector<std::vector<int>> result(n);
  for (int i = 0; i < n; ++i) {
    std::vector<char> in(mesh.num_triangles(), 0);
    std::vector<int> frontier;
    for (int k = 0; k < mesh.num_triangles(); ++k)
      if (element_owner[k] == i) {
        in[k] = 1;
        frontier.push_back(k);
      }
    for (int layer = 0; layer < l; ++layer) {
      std::vector<int> next;
      for (int k : frontier)
        for (int v : mesh.triangles[k])
          for (int t : star[v])
            if (!in[t]) {
              in[t] = 1;
              next.push_back(t);
            }
      frontier.swap(next);
      if (frontier.empty()) break;
    }
    for (int k = 0; k < mesh.num_triangles(); ++k)
      if (in[k]) result[i].push_back(k);
  }
  return result;
}

std::vector<std::vector<int>> build_restrictions(
    const Space& space, const std::vector<std::vector<int>>& overlapped_elements) {
  std::vector<std::vector<int>> dof_sets(overlapped_elements.size());
  for (size_t i = 0; i < overlapped_elements.size(); ++i) {
    std::vector<int>& dofs = dof_sets[i];
    for (int k : overlapped_elements[i]) {
      std::vector<int> ed = space.dofs_of_element(k);
      dofs.insert(dofs.end(), ed.begin(), ed.end());
    }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  }
  return dof_sets;
}

std::vector<Eigen::VectorXd> build_partition_of_unity(
    const Space& space, const std::vector<int>& element_owner,
    const std::vector<std::vector<int>>& dof_sets) {
  std::vector<int> dof_owner(space.total_dofs, std::numeric_limits<int>::max());
  for (int k = 0; k < space.mesh->num_triangles(); ++k) {
    const int o = element_owner[k];
    for (int d : space.dofs_of_element(k)) dof_owner[d] = std::min(dof_owner[d], o);
  }
  for (int d = 0; d < space.total_dofs; ++d)
    if (dof_owner[d] == std::numeric_limits<int>::max())
      throw std::logic_error("build_partition_of_unity: dof with no supporting element");

  std::vector<Eigen::VectorXd> weights(dof_sets.size());
  for (size_t i = 0; i < dof_sets.size(); ++i) {
    weights[i] = Eigen::VectorXd::Zero(dof_sets[i].size());
    for (size_t a = 0; a < dof_sets[i].size(); ++a)
      if (dof_owner[dof_sets[i][a]] == static_cast<int>(i)) weights[i](a) = 1.0;
  }
  return weights;
}

Decomposition build_decomposition(const Mesh& mesh, const Space& space, int n, int overlap,
                                  PartitionMethod method) {
  Decomposition d;
  d.n_subdomains = n;
  d.overlap = overlap;
  d.element_owner = partition_elements(mesh, n, method);
  d.overlapped_elements = expand_overlap(mesh, d.element_owner, overlap);
  d.dof_sets = build_restrictions(space, d.overlapped_elements);
  d.pu_weights = build_partition_of_unity(space, d.element_owner, d.dof_sets);
  return d;
}

}  // namespace ddlab
