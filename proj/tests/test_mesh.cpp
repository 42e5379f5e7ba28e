#include "ddlab/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ddlab;

TEST_CASE("unit square at resolution 1 matches the hand count") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 1);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_facets() == 5);
  int boundary = 0;
  for (int f = 0; f < m.num_facets(); ++f) boundary += m.facet_on_boundary(f) ? 1 : 0;
  CHECK(boundary == 4);
  CHECK(m.h == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mesh areas match the analytic domain area") {
  for (auto [shape, res] : {std::pair{DomainShape::unit_square(), 7},
                            {DomainShape::rectangle(5.0, 1.0), 6},
                            {DomainShape::l_shape(), 5},
                            {DomainShape::t_shape(), 4}}) {
    Mesh m = build_structured_mesh(shape, res);
    CHECK(m.total_area() == doctest::Approx(shape.area()).epsilon(1e-12));
  }
}

TEST_CASE("every triangle is positively oriented and adjacency is involutive") {
  Mesh m = build_structured_mesh(DomainShape::l_shape(), 4);
  for (int k = 0; k < m.num_triangles(); ++k) CHECK(m.triangle_area(k) > 0);
  for (int f = 0; f < m.num_facets(); ++f) {
    const Facet& fc = m.facets[f];
    int count = 0;
    for (int k : {fc.tri_in, fc.tri_out}) {
      if (k < 0) continue;
      ++count;
      bool listed = false;
      for (int g : m.triangle_facets[k]) listed |= (g == f);
      CHECK(listed);
    }
    CHECK(count == (m.facet_on_boundary(f) ? 1 : 2));
  }
}

TEST_CASE("Euler relation holds on all shapes") {
  for (auto [shape, res] : {std::pair{DomainShape::unit_square(), 3},
                            {DomainShape::rectangle(2.0, 1.0), 4},
                            {DomainShape::l_shape(), 3},
                            {DomainShape::t_shape(), 6}}) {
    Mesh m = build_structured_mesh(shape, res);
    CHECK(m.num_vertices() - m.num_facets() + m.num_triangles() == 1);
  }
}

TEST_CASE("refining by two halves h exactly") {
  Mesh coarse = build_structured_mesh(DomainShape::unit_square(), 5);
  Mesh fine = build_structured_mesh(DomainShape::unit_square(), 10);
  CHECK(fine.h == coarse.h / 2.0);
}

TEST_CASE("layer bands tile the beam exactly") {
  DomainShape shape = DomainShape::rectangle(5.0, 1.0, BoundaryRule::BeamClamp);
  shape.layers = LayerSpec{10, 1};
  Mesh m = build_structured_mesh(shape, 10);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const int band = m.region_tags[k];
    CHECK(band >= 0);
    CHECK(band <= 9);
    const double y = m.triangle_centroid(k).y();
    CHECK(y > band / 10.0);
    CHECK(y < (band + 1) / 10.0);
  }
  CHECK(m.num_regions() == 10);
}

TEST_CASE("layer bands that do not align with the grid are rejected") {
  DomainShape shape = DomainShape::rectangle(5.0, 1.0);
  shape.layers = LayerSpec{10, 1};
  CHECK_THROWS(build_structured_mesh(shape, 7));
}

TEST_CASE("t_shape needs an even resolution") {
  CHECK_THROWS(build_structured_mesh(DomainShape::t_shape(), 3));
}

TEST_CASE("L-shape clamp tags the left side and the x<0 top/bottom portions") {
  Mesh m = build_structured_mesh(DomainShape::l_shape(BoundaryRule::LShapeClamp), 4);
  for (const auto& [f, tag] : m.boundary_tags) {
    Vec2 mid = m.facet_midpoint(f);
    const bool clamped = std::abs(mid.x() + 1) < 1e-9 ||
                         (std::abs(mid.y() + 1) < 1e-9 && mid.x() < 0) ||
                         (std::abs(mid.y() - 1) < 1e-9 && mid.x() < 0);
    CHECK(tag == (clamped ? "gamma_d" : "gamma_n"));
  }
}

TEST_CASE("beam rule clamps x=0 only") {
  Mesh m = build_structured_mesh(DomainShape::rectangle(5.0, 1.0, BoundaryRule::BeamClamp), 2);
  for (const auto& [f, tag] : m.boundary_tags) {
    if (std::abs(m.facet_midpoint(f).x()) < 1e-9)
      CHECK(tag == "gamma_d");
    else
      CHECK(tag == "gamma_n");
  }
}

TEST_CASE("cavity rule tags the lid y=1") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(BoundaryRule::CavityLid), 3);
  std::set<std::string> tags;
  for (const auto& [f, tag] : m.boundary_tags) {
    tags.insert(tag);
    CHECK(tag == (std::abs(m.facet_midpoint(f).y() - 1) < 1e-9 ? "lid" : "wall"));
  }
  CHECK(tags == std::set<std::string>{"lid", "wall"});
}

TEST_CASE("t-shape rule tags inflow and outflow") {
  Mesh m = build_structured_mesh(DomainShape::t_shape(BoundaryRule::TShapeInOut), 4);
  int inflow = 0, outflow = 0;
  for (const auto& [f, tag] : m.boundary_tags) {
    if (tag == "inflow") {
      ++inflow;
      CHECK(std::abs(m.facet_midpoint(f).x()) < 1e-9);
    } else if (tag == "outflow") {
      ++outflow;
      CHECK(std::abs(m.facet_midpoint(f).x() - 1.5) < 1e-9);
    }
  }
  CHECK(inflow == 4);
  CHECK(outflow == 4);
}
