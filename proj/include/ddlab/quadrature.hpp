#pragma once

#include <Eigen/Core>

#include <vector>

namespace ddlab {

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1). Weights sum to 1;
/// integrate with |K| * sum_q w_q f(x_q).
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Quadrature on [0,1]. Weights sum to 1; integrate with |E| * sum w f(x(t)).
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Smallest tabulated rule exact for polynomials of the given total degree.
const TriangleRule& triangle_rule(int degree);
const EdgeRule& edge_rule(int degree);

}  // namespace ddlab
