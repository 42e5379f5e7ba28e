#include "ddlab/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace ddlab {

namespace {

std::vector<std::pair<int, int>> monomial_exponents(int degree) {
  std::vector<std::pair<int, int>> m;
  for (int d = 0; d <= degree; ++d)
    for (int px = d; px >= 0; --px) m.emplace_back(px, d - px);
  return m;
}

double mono(const std::pair<int, int>& e, const Vec2& xi) {
  return std::pow(xi.x(), e.first) * std::pow(xi.y(), e.second);
}

Vec2 mono_grad(const std::pair<int, int>& e, const Vec2& xi) {
  auto [px, py] = e;
  double gx = px == 0 ? 0.0 : px * std::pow(xi.x(), px - 1) * std::pow(xi.y(), py);
  double gy = py == 0 ? 0.0 : py * std::pow(xi.x(), px) * std::pow(xi.y(), py - 1);
  return {gx, gy};
}

std::vector<RefNode> reference_nodes(int degree) {
  const std::array<Vec2, 3> v = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  std::vector<RefNode> nodes;
  for (int i = 0; i < 3; ++i) nodes.push_back({v[i], 0, i, 0});
  for (int e = 0; e < 3; ++e) {
    Vec2 p = v[e], q = v[(e + 1) % 3];
    for (int s = 1; s < degree; ++s)
      nodes.push_back({p + (q - p) * (static_cast<double>(s) / degree), 1, e, s - 1});
  }
  if (degree >= 3) nodes.push_back({Vec2(1.0 / 3, 1.0 / 3), 2, 0, 0});
  return nodes;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("LagrangeBasis: degree must be 1, 2 or 3");
  nodes_ = reference_nodes(degree);
  monomials_ = monomial_exponents(degree);
  const int n = size();
  if (static_cast<int>(monomials_.size()) != n)
    throw std::logic_error("LagrangeBasis: node/monomial count mismatch");
  Eigen::MatrixXd vand(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vand(i, j) = mono(monomials_[j], nodes_[i].xi);
  coeffs_ = vand.inverse();
}

Eigen::VectorXd LagrangeBasis::values(const Vec2& xi) const {
  const int n = size();
  Eigen::VectorXd m(n);
  for (int k = 0; k < n; ++k) m(k) = mono(monomials_[k], xi);
  return coeffs_.transpose() * m;
}

Eigen::MatrixX2d LagrangeBasis::gradients(const Vec2& xi) const {
  const int n = size();
  Eigen::MatrixX2d g(n, 2);
  Eigen::MatrixX2d mg(n, 2);
  for (int k = 0; k < n; ++k) mg.row(k) = mono_grad(monomials_[k], xi).transpose();
  g = coeffs_.transpose() * mg;
  return g;
}

const LagrangeBasis& LagrangeBasis::get(int degree) {
  static const std::array<LagrangeBasis, 3> cache = {LagrangeBasis(1), LagrangeBasis(2),
                                                     LagrangeBasis(3)};
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("LagrangeBasis: degree must be 1, 2 or 3");
  return cache[degree - 1];
}

AffineMap AffineMap::from_triangle(const Mesh& mesh, int k) {
  const auto& t = mesh.triangles[k];
  AffineMap m;
  m.origin = mesh.vertices[t[0]];
  m.jac.col(0) = mesh.vertices[t[1]] - m.origin;
  m.jac.col(1) = mesh.vertices[t[2]] - m.origin;
  m.det = m.jac.determinant();
  m.jac_inv = m.jac.inverse();
  return m;
}

Vec2 BdmBasis::value(int i, const Vec2& x) const {
  Vec2 xi = (x - center) / scale;
  double vx = coeffs(0, i) + coeffs(1, i) * xi.x() + coeffs(2, i) * xi.y();
  double vy = coeffs(3, i) + coeffs(4, i) * xi.x() + coeffs(5, i) * xi.y();
  return {vx, vy};
}

Eigen::Matrix2d BdmBasis::gradient(int i) const {
  Eigen::Matrix2d g;
  g << coeffs(1, i), coeffs(2, i), coeffs(4, i), coeffs(5, i);
  return g / scale;
}

double BdmBasis::divergence(int i) const { return (coeffs(1, i) + coeffs(5, i)) / scale; }

BdmBasis build_bdm1(const Mesh& mesh, int k) {
  BdmBasis b;
  b.center = mesh.triangle_centroid(k);
  b.scale = 0;
  const auto& tri = mesh.triangles[k];
  for (int e = 0; e < 3; ++e)
    b.scale = std::max(b.scale, (mesh.vertices[tri[(e + 1) % 3]] - mesh.vertices[tri[e]]).norm());

  // Moment matrix of the scaled monomial fields against the six functionals.
  const EdgeRule& rule = edge_rule(5);
  Eigen::Matrix<double, 6, 6> moments = Eigen::Matrix<double, 6, 6>::Zero();
  for (int e = 0; e < 3; ++e) {
    int f = mesh.triangle_facets[k][e];
    const Facet& fc = mesh.facets[f];
    Vec2 p0 = mesh.vertices[fc.v0], p1 = mesh.vertices[fc.v1];
    double len = (p1 - p0).norm();
    Vec2 n = mesh.facet_normal(f);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double s = rule.points[q];
      double w = rule.weights[q] * len;
      Vec2 x = p0 + s * (p1 - p0);
      Vec2 xi = (x - b.center) / b.scale;
      // monomial fields: (1,0),(xi,0),(eta,0),(0,1),(0,xi),(0,eta)
      const std::array<Vec2, 6> fields = {Vec2(1, 0),      Vec2(xi.x(), 0), Vec2(xi.y(), 0),
                                          Vec2(0, 1),      Vec2(0, xi.x()), Vec2(0, xi.y())};
      for (int m = 0; m < 2; ++m) {
        double qm = m == 0 ? 1.0 : 2.0 * s - 1.0;
        for (int j = 0; j < 6; ++j) moments(2 * e + m, j) += w * qm * n.dot(fields[j]);
      }
    }
  }
  b.coeffs = moments.inverse();
  return b;
}

double FacetProjection::basis(int m, double t) {
  switch (m) {
    case 0: return 1.0;
    case 1: return 2.0 * t - 1.0;
    case 2: return 6.0 * t * t - 6.0 * t + 1.0;
    default: throw std::invalid_argument("FacetProjection: degree not supported");
  }
}

Eigen::VectorXd FacetProjection::project(const EdgeRule& rule,
                                         const std::vector<double>& fvals) const {
  if (fvals.size() != rule.points.size())
    throw std::invalid_argument("FacetProjection::project: sample count mismatch");
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(degree + 1);
  for (int m = 0; m <= degree; ++m) {
    double num = 0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      num += rule.weights[q] * fvals[q] * basis(m, rule.points[q]);
    // shifted Legendre: int_0^1 basis_m^2 dt = 1/(2m+1)
    coef(m) = num * (2 * m + 1);
  }
  return coef;
}

double FacetProjection::evaluate(const Eigen::VectorXd& coef, double t) const {
  double v = 0;
  for (int m = 0; m < coef.size(); ++m) v += coef(m) * basis(m, t);
  return v;
}

}  // namespace ddlab
