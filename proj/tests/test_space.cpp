#include "ddlab/space.hpp"

#include "ddlab/elements.hpp"

#include <doctest.h>

#include <set>

using namespace ddlab;

TEST_CASE("dof counts on the two-triangle square match entity counting") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 1);
  REQUIRE(m.num_vertices() == 4);
  REQUIRE(m.num_facets() == 5);

  Space th2 = build_space(m, Scheme::TaylorHood, 2);
  CHECK(th2.velocity_dofs == 2 * (4 + 5));
  CHECK(th2.pressure_dofs == 4);
  CHECK(th2.total_dofs == 22);

  Space th3 = build_space(m, Scheme::TaylorHood, 3);
  CHECK(th3.velocity_dofs == 2 * (4 + 2 * 5 + 2));
  CHECK(th3.pressure_dofs == 4 + 5);
  CHECK(th3.total_dofs == 32 + 9);

  Space hdg = build_space(m, Scheme::HDG, 1);
  CHECK(hdg.velocity_dofs == 2 * 5);
  CHECK(hdg.multiplier_dofs == 5);
  CHECK(hdg.pressure_dofs == 2);
  CHECK(hdg.total_dofs == 17);
}

TEST_CASE("unsupported degrees are rejected") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 1);
  CHECK_THROWS(build_space(m, Scheme::TaylorHood, 1));
  CHECK_THROWS(build_space(m, Scheme::TaylorHood, 4));
  CHECK_THROWS(build_space(m, Scheme::HDG, 2));
}

TEST_CASE("shared edge nodes agree between neighbouring elements") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 2);
  Space sp = build_space(m, Scheme::TaylorHood, 3);
  // every node id maps to exactly one coordinate
  const ScalarLayout& lay = sp.velocity_layout;
  for (int k = 0; k < m.num_triangles(); ++k) {
    const LagrangeBasis& basis = LagrangeBasis::get(3);
    AffineMap map = AffineMap::from_triangle(m, k);
    for (int i = 0; i < basis.size(); ++i) {
      Vec2 x = map.to_physical(basis.nodes()[i].xi);
      CHECK((lay.node_xy[lay.element_nodes[k][i]] - x).norm() < 1e-12);
    }
  }
}

TEST_CASE("dofs_of_element covers each block and is sorted") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 2);
  Space th = build_space(m, Scheme::TaylorHood, 2);
  std::set<int> seen;
  for (int k = 0; k < m.num_triangles(); ++k) {
    auto dofs = th.dofs_of_element(k);
    CHECK(std::is_sorted(dofs.begin(), dofs.end()));
    CHECK(dofs.size() == 2 * 6 + 3);
    seen.insert(dofs.begin(), dofs.end());
  }
  CHECK(static_cast<int>(seen.size()) == th.total_dofs);

  Space hdg = build_space(m, Scheme::HDG, 1);
  seen.clear();
  for (int k = 0; k < m.num_triangles(); ++k) {
    auto dofs = hdg.dofs_of_element(k);
    CHECK(dofs.size() == 6 + 1 + 3);
    seen.insert(dofs.begin(), dofs.end());
  }
  CHECK(static_cast<int>(seen.size()) == hdg.total_dofs);
}

TEST_CASE("dof numbering is deterministic") {
  Mesh m1 = build_structured_mesh(DomainShape::l_shape(), 3);
  Mesh m2 = build_structured_mesh(DomainShape::l_shape(), 3);
  Space s1 = build_space(m1, Scheme::TaylorHood, 2);
  Space s2 = build_space(m2, Scheme::TaylorHood, 2);
  for (int k = 0; k < m1.num_triangles(); ++k) CHECK(s1.dofs_of_element(k) == s2.dofs_of_element(k));
}
