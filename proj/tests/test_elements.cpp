#include "ddlab/elements.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

TEST_CASE("Lagrange bases satisfy the Kronecker property") {
  for (int degree : {1, 2, 3}) {
    const LagrangeBasis& basis = LagrangeBasis::get(degree);
    for (int i = 0; i < basis.size(); ++i) {
      Eigen::VectorXd v = basis.values(basis.nodes()[i].xi);
      for (int j = 0; j < basis.size(); ++j)
        CHECK(v(j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("Lagrange bases reproduce polynomials and a partition of unity") {
  const LagrangeBasis& basis = LagrangeBasis::get(3);
  const Vec2 xi(0.27, 0.41);
  Eigen::VectorXd v = basis.values(xi);
  double sum = 0, lin = 0;
  for (int i = 0; i < basis.size(); ++i) {
    sum += v(i);
    lin += v(i) * basis.nodes()[i].xi.x();
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin == doctest::Approx(xi.x()).epsilon(1e-12));

  Eigen::MatrixX2d g = basis.gradients(xi);
  Vec2 gsum = Vec2::Zero();
  for (int i = 0; i < basis.size(); ++i) gsum += g.row(i).transpose();
  CHECK(gsum.norm() == doctest::Approx(0.0).epsilon(1e-11));
}

TEST_CASE("BDM basis is dual to the facet moment functionals") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 2);
  const EdgeRule& rule = edge_rule(5);
  for (int k : {0, 3, 5}) {
    BdmBasis b = build_bdm1(m, k);
    for (int e = 0; e < 3; ++e) {
      const int f = m.triangle_facets[k][e];
      const Facet& fc = m.facets[f];
      Vec2 p0 = m.vertices[fc.v0], p1 = m.vertices[fc.v1];
      const double len = (p1 - p0).norm();
      const Vec2 n = m.facet_normal(f);
      for (int mom = 0; mom < 2; ++mom) {
        for (int j = 0; j < 6; ++j) {
          double val = 0;
          for (size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            const Vec2 x = p0 + s * (p1 - p0);
            const double qm = mom == 0 ? 1.0 : 2.0 * s - 1.0;
            val += rule.weights[q] * len * qm * n.dot(b.value(j, x));
          }
          CHECK(val == doctest::Approx(j == 2 * e + mom ? 1.0 : 0.0).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("BDM divergence matches the gradient trace") {
  Mesh m = build_structured_mesh(DomainShape::unit_square(), 1);
  BdmBasis b = build_bdm1(m, 0);
  for (int i = 0; i < 6; ++i)
    CHECK(b.divergence(i) == doctest::Approx(b.gradient(i).trace()).epsilon(1e-12));
}

TEST_CASE("facet projection is the identity on its polynomial space") {
  const EdgeRule& rule = edge_rule(9);
  for (int degree : {0, 1, 2}) {
    FacetProjection proj{degree};
    // samples of a degree-`degree` polynomial
    std::vector<double> f(rule.points.size());
    for (size_t q = 0; q < rule.points.size(); ++q)
      f[q] = FacetProjection::basis(degree, rule.points[q]) * 1.7 - 0.3;
    Eigen::VectorXd c = proj.project(rule, f);
    // projecting the projection changes nothing
    std::vector<double> g(rule.points.size());
    for (size_t q = 0; q < rule.points.size(); ++q) g[q] = proj.evaluate(c, rule.points[q]);
    Eigen::VectorXd c2 = proj.project(rule, g);
    for (int i = 0; i <= degree; ++i) CHECK(c2(i) == doctest::Approx(c(i)).epsilon(1e-12));
  }
}

TEST_CASE("projecting a constant returns the constant") {
  const EdgeRule& rule = edge_rule(3);
  FacetProjection proj{0};
  std::vector<double> f(rule.points.size(), 4.25);
  Eigen::VectorXd c = proj.project(rule, f);
  CHECK(c(0) == doctest::Approx(4.25).epsilon(1e-14));
}
