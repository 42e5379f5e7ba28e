#include "ddlab/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ddlab {

namespace {

using Eigen::Vector2d;

void add_point(TriangleRule& r, double /*l1*/, double l2, double l3, double w) {
  // reference triangle (0,0),(1,0),(0,1): x = l2, y = l3
  r.points.emplace_back(l2, l3);
  r.weights.push_back(w);
}

void add_sym3(TriangleRule& r, double a, double b, double w) {
  // orbit of (a,b,b)
  add_point(r, a, b, b, w);
  add_point(r, b, a, b, w);
  add_point(r, b, b, a, w);
}

/// Nodes/weights of a Gauss rule from the symmetric tridiagonal Jacobi matrix
/// (Golub-Welsch). mu0 is the total mass of the weight function.
std::pair<std::vector<double>, std::vector<double>> golub_welsch(
    const std::vector<double>& diag, const std::vector<double>& offdiag_sq, double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) j(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    const double b = std::sqrt(offdiag_sq[i]);
    j(i, i + 1) = j(i + 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double first = es.eigenvectors()(0, i);
    weights[i] = mu0 * first * first;
  }
  return {nodes, weights};
}

/// n-point Gauss-Legendre on [0,1], exact to degree 2n-1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
  std::vector<double> diag(n, 0.0), off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = k * k / (4.0 * k * k - 1.0);
  auto [x, w] = golub_welsch(diag, off, 2.0);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (1.0 + x[i]);
    w[i] *= 0.5;
  }
  return {x, w};
}

/// n-point Gauss-Jacobi with weight (1-x) on [0,1], normalised mass 1/2.
std::pair<std::vector<double>, std::vector<double>> gauss_jacobi10(int n) {
  // recurrence of Jacobi(alpha=1, beta=0) polynomials on [-1,1]
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) off[k - 1] = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
  auto [x, w] = golub_welsch(diag, off, 2.0);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (1.0 + x[i]);
    w[i] *= 0.25;  // maps int_{-1}^{1} (1-xi) dxi onto int_0^1 (1-x) dx
  }
  return {x, w};
}

/// Conical-product rule on the reference triangle, exact to total degree d:
///   int_T f = int_0^1 int_0^1 f(u, v(1-u)) (1-u) dv du.
TriangleRule conical_rule(int degree) {
  const int n = (degree + 2) / 2 + ((degree + 2) % 2 ? 1 : 0);  // 2n-1 >= degree+1
  auto [u, wu] = gauss_jacobi10(n);
  auto [v, wv] = gauss_legendre01(n);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.points.emplace_back(u[i], v[j] * (1.0 - u[i]));
      r.weights.push_back(2.0 * wu[i] * wv[j]);  // normalise to sum 1
    }
  return r;
}

TriangleRule make_triangle_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      add_point(r, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0);
      break;
    case 2:
      add_sym3(r, 2.0 / 3, 1.0 / 6, 1.0 / 3);
      break;
    case 3:
      add_point(r, 1.0 / 3, 1.0 / 3, 1.0 / 3, -27.0 / 48);
      add_sym3(r, 0.6, 0.2, 25.0 / 48);
      break;
    case 4:
      add_sym3(r, 0.108103018168070, 0.445948490915965, 0.223381589678011);
      add_sym3(r, 0.816847572980459, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      add_point(r, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225);
      add_sym3(r, 0.059715871789770, 0.470142064105115, 0.132394152788506);
      add_sym3(r, 0.797426985353087, 0.101286507323456, 0.125939180544827);
      break;
    default:
      return conical_rule(degree);
  }
  return r;
}

EdgeRule make_edge_rule(int npoints) {
  auto [x, w] = gauss_legendre01(npoints);
  EdgeRule r;
  r.degree = 2 * npoints - 1;
  r.points = x;
  r.weights = w;
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const std::array<TriangleRule, 12> rules = {
      make_triangle_rule(1),  make_triangle_rule(2),  make_triangle_rule(3),
      make_triangle_rule(4),  make_triangle_rule(5),  make_triangle_rule(6),
      make_triangle_rule(7),  make_triangle_rule(8),  make_triangle_rule(9),
      make_triangle_rule(10), make_triangle_rule(11), make_triangle_rule(12)};
  if (degree <= 1) return rules[0];
  if (degree > 12) throw std::invalid_argument("triangle_rule: degree exceeds available rules");
  return rules[degree - 1];
}

const EdgeRule& edge_rule(int degree) {
  static const std::array<EdgeRule, 8> rules = {make_edge_rule(1), make_edge_rule(2),
                                                make_edge_rule(3), make_edge_rule(4),
                                                make_edge_rule(5), make_edge_rule(6),
                                                make_edge_rule(7), make_edge_rule(8)};
  int n = degree / 2 + 1;  // n points integrate degree 2n-1
  if (n < 1) n = 1;
  if (n > 8) throw std::invalid_argument("edge_rule: degree exceeds available rules");
  return rules[n - 1];
}

}  // namespace ddlab
