#include "ddlab/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddlab;

namespace {

// exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!
double exact_monomial(int a, int b) {
  auto fact = [](int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return fact(a) * fact(b) / fact(a + b + 2);
}

}  // namespace

TEST_CASE("triangle rules integrate monomials of their degree exactly") {
  for (int degree : {1, 2, 3, 4, 5, 6, 8}) {
    const TriangleRule& rule = triangle_rule(degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0;
        for (size_t q = 0; q < rule.points.size(); ++q)
          sum += rule.weights[q] * std::pow(rule.points[q].x(), a) *
                 std::pow(rule.points[q].y(), b);
        // weights are normalised: integral = |T| * sum with |T| = 1/2
        CHECK(0.5 * sum == doctest::Approx(exact_monomial(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("edge rules integrate polynomials of their degree exactly") {
  for (int degree : {1, 3, 5, 7, 9}) {
    const EdgeRule& rule = edge_rule(degree);
    for (int p = 0; p <= degree; ++p) {
      double sum = 0;
      for (size_t q = 0; q < rule.points.size(); ++q)
        sum += rule.weights[q] * std::pow(rule.points[q], p);
      CHECK(sum == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("rule weights are normalised") {
  for (int degree : {1, 2, 3, 4, 5, 6, 8}) {
    const TriangleRule& r = triangle_rule(degree);
    double s = 0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
}
