#include "ddlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace ddlab {

namespace {

constexpr double kGeomTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) < kGeomTol; }

struct CellGrid {
  double x0 = 0, y0 = 0;
  double hc = 0;  // cell size
  int nx = 0, ny = 0;
  std::vector<char> keep;  // nx*ny cell mask

  bool kept(int i, int j) const { return keep[static_cast<size_t>(j) * nx + i] != 0; }
};

CellGrid make_grid(const DomainShape& shape, int resolution) {
  if (resolution < 1) throw std::invalid_argument("build_structured_mesh: resolution must be >= 1");
  CellGrid g;
  g.hc = 1.0 / resolution;
  auto require_integral = [&](double v, const char* what) {
    double cells = v * resolution;
    if (std::abs(cells - std::round(cells)) > kGeomTol)
      throw std::invalid_argument(std::string("build_structured_mesh: ") + what +
                                  " is not resolvable by this resolution");
    return static_cast<int>(std::round(cells));
  };
  switch (shape.kind) {
    case DomainKind::UnitSquare:
      g.x0 = 0;
      g.y0 = 0;
      g.nx = g.ny = resolution;
      g.keep.assign(static_cast<size_t>(g.nx) * g.ny, 1);
      break;
    case DomainKind::Rectangle: {
      if (shape.width <= 0 || shape.height <= 0)
        throw std::invalid_argument("build_structured_mesh: rectangle extents must be positive");
      g.x0 = 0;
      g.y0 = 0;
      g.nx = require_integral(shape.width, "rectangle width");
      g.ny = require_integral(shape.height, "rectangle height");
      g.keep.assign(static_cast<size_t>(g.nx) * g.ny, 1);
      break;
    }
    case DomainKind::LShape: {
      // (-1,1)^2 minus (0,1) x (-1,0)
      g.x0 = -1;
      g.y0 = -1;
      g.nx = g.ny = 2 * resolution;
      g.keep.assign(static_cast<size_t>(g.nx) * g.ny, 1);
      for (int j = 0; j < resolution; ++j)
        for (int i = resolution; i < g.nx; ++i) g.keep[static_cast<size_t>(j) * g.nx + i] = 0;
      break;
    }
    case DomainKind::TShape: {
      // (0,1.5) x (0,1) union (0.5,1) x (-1,1)
      if (resolution % 2 != 0)
        throw std::invalid_argument(
            "build_structured_mesh: t_shape needs an even resolution so x=0.5 lies on the grid");
      g.x0 = 0;
      g.y0 = -1;
      g.nx = require_integral(1.5, "t_shape width");
      g.ny = 2 * resolution;
      g.keep.assign(static_cast<size_t>(g.nx) * g.ny, 0);
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          bool top_bar = j >= resolution;                          // y in (0,1)
          bool stem = i >= resolution / 2 && i < resolution;       // x in (0.5,1)
          if (top_bar || stem) g.keep[static_cast<size_t>(j) * g.nx + i] = 1;
        }
      }
      break;
    }
  }
  return g;
}

int assign_region(const DomainShape& shape, const CellGrid& g, const Vec2& centroid) {
  if (!shape.layers) return 0;
  const LayerSpec& ls = *shape.layers;
  if (ls.count < 1) throw std::invalid_argument("layer count must be >= 1");
  double lo = ls.axis == 0 ? g.x0 : g.y0;
  double extent = ls.axis == 0 ? g.nx * g.hc : g.ny * g.hc;
  // Bands must tile the grid exactly: every cell row/column sits in one band.
  double cells_per_band = (ls.axis == 0 ? g.nx : g.ny) / static_cast<double>(ls.count);
  if (std::abs(cells_per_band - std::round(cells_per_band)) > kGeomTol)
    throw std::invalid_argument("build_structured_mesh: layer bands do not align with the grid");
  double c = ls.axis == 0 ? centroid.x() : centroid.y();
  int band = static_cast<int>(std::floor((c - lo) / extent * ls.count));
  return std::clamp(band, 0, ls.count - 1);
}

}  // namespace

DomainShape DomainShape::unit_square(BoundaryRule rule) {
  DomainShape s;
  s.kind = DomainKind::UnitSquare;
  s.boundary = rule;
  return s;
}

DomainShape DomainShape::rectangle(double w, double h, BoundaryRule rule) {
  DomainShape s;
  s.kind = DomainKind::Rectangle;
  s.width = w;
  s.height = h;
  s.boundary = rule;
  return s;
}

DomainShape DomainShape::l_shape(BoundaryRule rule) {
  DomainShape s;
  s.kind = DomainKind::LShape;
  s.boundary = rule;
  return s;
}

DomainShape DomainShape::t_shape(BoundaryRule rule) {
  DomainShape s;
  s.kind = DomainKind::TShape;
  s.boundary = rule;
  return s;
}

double DomainShape::area() const {
  switch (kind) {
    case DomainKind::UnitSquare: return 1.0;
    case DomainKind::Rectangle: return width * height;
    case DomainKind::LShape: return 3.0;
    case DomainKind::TShape: return 1.5 + 0.5;  // top bar + stem below y=0
  }
  return 0.0;
}

int Mesh::num_regions() const {
  int r = 0;
  for (int id : region_tags) r = std::max(r, id + 1);
  return r;
}

double Mesh::triangle_area(int k) const {
  const auto& t = triangles[k];
  Vec2 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

Vec2 Mesh::triangle_centroid(int k) const {
  const auto& t = triangles[k];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double Mesh::facet_length(int f) const {
  return (vertices[facets[f].v1] - vertices[facets[f].v0]).norm();
}

Vec2 Mesh::facet_midpoint(int f) const {
  return 0.5 * (vertices[facets[f].v0] + vertices[facets[f].v1]);
}

Vec2 Mesh::facet_tangent(int f) const {
  return (vertices[facets[f].v1] - vertices[facets[f].v0]).normalized();
}

Vec2 Mesh::facet_normal(int f) const {
  Vec2 t = facet_tangent(f);
  return Vec2(t.y(), -t.x());
}

double Mesh::outward_sign(int f, int k) const {
  Vec2 n = facet_normal(f);
  Vec2 d = facet_midpoint(f) - triangle_centroid(k);
  return n.dot(d) > 0 ? 1.0 : -1.0;
}

Vec2 Mesh::outward_normal(int f, int k) const { return outward_sign(f, k) * facet_normal(f); }

double Mesh::total_area() const {
  double a = 0;
  for (int k = 0; k < num_triangles(); ++k) a += triangle_area(k);
  return a;
}

Mesh build_structured_mesh(const DomainShape& shape, int resolution) {
  CellGrid g = make_grid(shape, resolution);

  Mesh mesh;
  const long npx = g.nx + 1;
  std::vector<int> vertex_id(static_cast<size_t>(npx) * (g.ny + 1), -1);
  auto lattice = [&](int i, int j) -> int& { return vertex_id[static_cast<size_t>(j) * npx + i]; };

  // Vertices in lattice order (deterministic), only those used by kept cells.
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0 && !used; ++dj)
        for (int di = -1; di <= 0 && !used; ++di) {
          int ci = i + di, cj = j + dj;
          if (ci >= 0 && ci < g.nx && cj >= 0 && cj < g.ny && g.kept(ci, cj)) used = true;
        }
      if (used) {
        lattice(i, j) = mesh.num_vertices();
        mesh.vertices.emplace_back(g.x0 + i * g.hc, g.y0 + j * g.hc);
      }
    }
  }

  // Two CCW triangles per kept cell, diagonal from lower-left to upper-right.
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.kept(i, j)) continue;
      int a = lattice(i, j), b = lattice(i + 1, j), c = lattice(i + 1, j + 1), d = lattice(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }

  // Facet enumeration: unique edges sorted by (v0,v1).
  std::map<std::pair<int, int>, int> edge_ids;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int p = t[e], q = t[(e + 1) % 3];
      edge_ids.emplace(std::minmax(p, q), -1);
    }
  {
    int id = 0;
    for (auto& [key, val] : edge_ids) {
      val = id++;
      Facet f;
      f.v0 = key.first;
      f.v1 = key.second;
      mesh.facets.push_back(f);
    }
  }
  mesh.triangle_facets.resize(mesh.triangles.size());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangles[k];
    for (int e = 0; e < 3; ++e) {
      int p = t[e], q = t[(e + 1) % 3];
      int f = edge_ids.at(std::minmax(p, q));
      mesh.triangle_facets[k][e] = f;
      Facet& fc = mesh.facets[f];
      if (fc.tri_in < 0)
        fc.tri_in = k;
      else
        fc.tri_out = k;
    }
  }

  mesh.region_tags.resize(mesh.triangles.size());
  for (int k = 0; k < mesh.num_triangles(); ++k)
    mesh.region_tags[k] = assign_region(shape, g, mesh.triangle_centroid(k));

  mesh.h = std::hypot(g.hc, g.hc);

  tag_boundary(mesh, shape);
  validate_mesh(mesh);
  return mesh;
}

void tag_boundary(Mesh& mesh, const DomainShape& shape) {
  mesh.boundary_tags.clear();
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.facet_on_boundary(f)) continue;
    Vec2 m = mesh.facet_midpoint(f);
    Vec2 n = mesh.outward_normal(f, mesh.facets[f].tri_in);
    std::string tag;
    switch (shape.boundary) {
      case BoundaryRule::NamedSides:
        if (near(n.x(), -1))
          tag = "left";
        else if (near(n.x(), 1))
          tag = "right";
        else if (near(n.y(), -1))
          tag = "bottom";
        else if (near(n.y(), 1))
          tag = "top";
        break;
      case BoundaryRule::LShapeClamp:
        // Clamped on the left side and the top/bottom portions left of x=0.
        if (near(m.x(), -1) || (near(m.y(), -1) && m.x() < 0) || (near(m.y(), 1) && m.x() < 0))
          tag = "gamma_d";
        else
          tag = "gamma_n";
        break;
      case BoundaryRule::BeamClamp:
        tag = near(m.x(), 0) ? "gamma_d" : "gamma_n";
        break;
      case BoundaryRule::CavityLid:
        tag = near(m.y(), 1) ? "lid" : "wall";
        break;
      case BoundaryRule::TShapeInOut:
        if (near(m.x(), 0))
          tag = "inflow";
        else if (near(m.x(), 1.5))
          tag = "outflow";
        else
          tag = "wall";
        break;
    }
    if (tag.empty()) throw std::runtime_error("tag_boundary: facet matches no rule of this shape");
    mesh.boundary_tags[f] = tag;
  }
}

void validate_mesh(const Mesh& mesh) {
  for (int k = 0; k < mesh.num_triangles(); ++k)
    if (mesh.triangle_area(k) <= 0) throw std::runtime_error("mesh: non-positive triangle area");

  int boundary = 0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facets[f];
    if (fc.tri_in < 0) throw std::runtime_error("mesh: facet without adjacency");
    if (fc.tri_out < 0) ++boundary;
    // involution: adjacent triangles must list this facet
    for (int k : {fc.tri_in, fc.tri_out}) {
      if (k < 0) continue;
      const auto& tf = mesh.triangle_facets[k];
      if (std::find(tf.begin(), tf.end(), f) == tf.end())
        throw std::runtime_error("mesh: facet adjacency is not involutive");
    }
  }

  // Euler relation for a simply connected planar triangulation.
  if (mesh.num_vertices() - mesh.num_facets() + mesh.num_triangles() != 1)
    throw std::runtime_error("mesh: Euler relation violated");

  for (int f = 0; f < mesh.num_facets(); ++f) {
    bool tagged = mesh.boundary_tags.count(f) > 0;
    if (mesh.facet_on_boundary(f) != tagged)
      throw std::runtime_error("mesh: boundary tags do not match boundary facets");
  }
  if (static_cast<int>(mesh.region_tags.size()) != mesh.num_triangles())
    throw std::runtime_error("mesh: every triangle needs a region id");
}

}  // namespace ddlab
