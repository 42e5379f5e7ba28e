#pragma once

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddlab {

using Vec2 = Eigen::Vector2d;

/// Edge of the triangulation with its adjacency. Vertices are stored with
/// v0 < v1; the tangent runs v0 -> v1 and the normal is the tangent rotated
/// by -90 degrees, so `normal` has a fixed global orientation independent of
/// which triangle looks at the facet.
struct Facet {
  int v0 = -1;
  int v1 = -1;
  int tri_in = -1;   // adjacent triangle with the lower index
  int tri_out = -1;  // second adjacent triangle, -1 on the boundary
};

enum class DomainKind { UnitSquare, Rectangle, LShape, TShape };

/// Which rule assigns boundary tags. NamedSides gives "left/right/bottom/top"
/// by outward normal; the others implement the tag sets of the canonical
/// problems.
enum class BoundaryRule { NamedSides, LShapeClamp, BeamClamp, CavityLid, TShapeInOut };

struct LayerSpec {
  int count = 1;
  int axis = 1;  // 0: bands in x, 1: bands in y
};

struct DomainShape {
  DomainKind kind = DomainKind::UnitSquare;
  double width = 1.0;   // rectangle only
  double height = 1.0;  // rectangle only
  std::optional<LayerSpec> layers;
  BoundaryRule boundary = BoundaryRule::NamedSides;

  static DomainShape unit_square(BoundaryRule rule = BoundaryRule::NamedSides);
  static DomainShape rectangle(double w, double h, BoundaryRule rule = BoundaryRule::NamedSides);
  static DomainShape l_shape(BoundaryRule rule = BoundaryRule::LShapeClamp);
  static DomainShape t_shape(BoundaryRule rule = BoundaryRule::TShapeInOut);

  double area() const;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex triples
  std::vector<Facet> facets;
  std::vector<std::array<int, 3>> triangle_facets;  // local edge (v[e],v[e+1]) -> facet id
  std::map<int, std::string> boundary_tags;         // boundary facet -> tag
  std::vector<int> region_tags;                     // material id per triangle
  double h = 0.0;                                   // max element diameter

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_facets() const { return static_cast<int>(facets.size()); }
  int num_regions() const;

  double triangle_area(int k) const;
  Vec2 triangle_centroid(int k) const;
  double facet_length(int f) const;
  Vec2 facet_midpoint(int f) const;
  Vec2 facet_tangent(int f) const;  // unit, v0 -> v1
  Vec2 facet_normal(int f) const;   // unit, tangent rotated -90 deg
  bool facet_on_boundary(int f) const { return facets[f].tri_out < 0; }

  /// Unit normal of facet f pointing out of triangle k (k must be adjacent).
  Vec2 outward_normal(int f, int k) const;
  /// +1 if facet_normal(f) points out of triangle k, -1 otherwise.
  double outward_sign(int f, int k) const;

  double total_area() const;
};

/// Uniform right-triangle mesh of `shape` with `resolution` cells per unit
/// length; every cell is split along its lower-left to upper-right diagonal.
/// Boundary facets are tagged according to shape.boundary and material
/// regions according to shape.layers.
Mesh build_structured_mesh(const DomainShape& shape, int resolution);

/// Re-assign boundary tags on an existing mesh of `shape`. Every boundary
/// facet receives exactly one tag; throws if a facet matches no rule.
void tag_boundary(Mesh& mesh, const DomainShape& shape);

/// Consistency checks used by the builder and the tests: orientation, facet
/// adjacency, Euler relation, tag coverage. Throws std::runtime_error.
void validate_mesh(const Mesh& mesh);

}  // namespace ddlab
