#include "ddlab/space.hpp"

#include "ddlab/elements.hpp"

#include <algorithm>
#include <stdexcept>

namespace ddlab {

ScalarLayout build_scalar_layout(const Mesh& mesh, int degree) {
  const LagrangeBasis& basis = LagrangeBasis::get(degree);
  ScalarLayout layout;
  layout.degree = degree;

  const int nv = mesh.num_vertices();
  const int nf = mesh.num_facets();
  const int per_edge = degree - 1;
  const int per_cell = degree >= 3 ? 1 : 0;
  layout.count = nv + nf * per_edge + mesh.num_triangles() * per_cell;

  layout.node_xy.resize(layout.count);
  for (int v = 0; v < nv; ++v) layout.node_xy[v] = mesh.vertices[v];

  layout.element_nodes.resize(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    AffineMap map = AffineMap::from_triangle(mesh, k);
    auto& elem = layout.element_nodes[k];
    elem.resize(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
      const RefNode& rn = basis.nodes()[i];
      int node = -1;
      if (rn.kind == 0) {
        node = tri[rn.entity];
      } else if (rn.kind == 1) {
        int e = rn.entity;
        int f = mesh.triangle_facets[k][e];
        // orient along the facet's global direction (v0 -> v1)
        int j = tri[e] == mesh.facets[f].v0 ? rn.sub : per_edge - 1 - rn.sub;
        node = nv + f * per_edge + j;
      } else {
        node = nv + nf * per_edge + k;
      }
      elem[i] = node;
      layout.node_xy[node] = map.to_physical(rn.xi);
    }
  }

  layout.facet_nodes.resize(nf);
  for (int f = 0; f < nf; ++f) {
    auto& nodes = layout.facet_nodes[f];
    nodes.push_back(mesh.facets[f].v0);
    nodes.push_back(mesh.facets[f].v1);
    for (int j = 0; j < per_edge; ++j) nodes.push_back(nv + f * per_edge + j);
  }
  return layout;
}

std::vector<int> Space::dofs_of_element(int k) const {
  std::vector<int> dofs;
  if (scheme == Scheme::TaylorHood) {
    dofs.reserve(2 * velocity_layout.element_nodes[k].size() +
                 pressure_layout.element_nodes[k].size());
    for (int n : velocity_layout.element_nodes[k]) {
      dofs.push_back(2 * n);
      dofs.push_back(2 * n + 1);
    }
    for (int n : pressure_layout.element_nodes[k]) dofs.push_back(pressure_offset() + n);
  } else {
    for (int e = 0; e < 3; ++e) {
      int f = mesh->triangle_facets[k][e];
      dofs.push_back(bdm_dof(f, 0));
      dofs.push_back(bdm_dof(f, 1));
    }
    dofs.push_back(hdg_pressure_dof(k));
    for (int e = 0; e < 3; ++e) dofs.push_back(multiplier_dof(mesh->triangle_facets[k][e]));
  }
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

Space build_space(const Mesh& mesh, Scheme scheme, int degree) {
  Space sp;
  sp.scheme = scheme;
  sp.degree = degree;
  sp.mesh = &mesh;
  if (scheme == Scheme::TaylorHood) {
    if (degree < 2)
      throw std::invalid_argument("build_space: Taylor-Hood requires degree >= 2");
    if (degree > 3)
      throw std::invalid_argument("build_space: Taylor-Hood degrees above 3 are not supported");
    sp.velocity_layout = build_scalar_layout(mesh, degree);
    sp.pressure_layout = build_scalar_layout(mesh, degree - 1);
    sp.velocity_dofs = 2 * sp.velocity_layout.count;
    sp.pressure_dofs = sp.pressure_layout.count;
    sp.multiplier_dofs = 0;
  } else {
    if (degree != 1)
      throw std::invalid_argument("build_space: hdG is implemented at lowest order (degree 1)");
    sp.velocity_dofs = 2 * mesh.num_facets();  // BDM_1: two normal moments per facet
    sp.pressure_dofs = mesh.num_triangles();   // discontinuous P_0
    sp.multiplier_dofs = mesh.num_facets();    // P_0 tangential trace per facet
  }
  sp.total_dofs = sp.velocity_dofs + sp.pressure_dofs + sp.multiplier_dofs;
  return sp;
}

}  // namespace ddlab
