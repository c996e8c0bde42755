#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rkdg/quadrature.hpp"

using namespace rkdg;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// int_T xi^a eta^b = a! b! / (a + b + 2)!
double triangle_moment(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

// int_tet xi^a eta^b nu^c = a! b! c! / (a + b + c + 3)!
double tet_moment(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

}  // namespace

TEST_CASE("triangle rules integrate every monomial up to their order") {
  for (int order = 1; order <= kMaxTriangleOrder; ++order) {
    const auto rule = triangle_rule(order);
    CHECK(rule.order >= order);
    for (int a = 0; a <= rule.order; ++a) {
      for (int b = 0; a + b <= rule.order; ++b) {
        double sum = 0.0;
        for (Eigen::Index q = 0; q < rule.size(); ++q) {
          sum += rule.weights(q) * std::pow(rule.nodes(0, q), a) * std::pow(rule.nodes(1, q), b);
        }
        INFO("order ", order, " monomial ", a, ",", b);
        CHECK(std::abs(sum - triangle_moment(a, b)) < 1e-12);
      }
    }
  }
}

TEST_CASE("triangle rules are interior with positive weights") {
  for (int order = 1; order <= kMaxTriangleOrder; ++order) {
    const auto rule = triangle_rule(order);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights(q) > 0.0);
      CHECK(rule.nodes(0, q) > 0.0);
      CHECK(rule.nodes(1, q) > 0.0);
      CHECK(rule.nodes(0, q) + rule.nodes(1, q) < 1.0);
    }
  }
}

TEST_CASE("tabulated triangle point counts") {
  CHECK(triangle_rule(1).size() == 1);
  CHECK(triangle_rule(2).size() == 3);
  CHECK(triangle_rule(5).size() == 7);
}

TEST_CASE("triangle rule outside the table") {
  CHECK_THROWS_AS(triangle_rule(0), std::out_of_range);
  CHECK_THROWS_AS(triangle_rule(kMaxTriangleOrder + 1), std::out_of_range);
}

TEST_CASE("Gauss-Legendre rules are exact to degree 2n-1") {
  for (int n = 1; n <= kMaxEdgePoints; ++n) {
    const auto rule = edge_rule(n);
    CHECK(rule.size() == n);
    CHECK(rule.order == 2 * n - 1);
    for (int a = 0; a <= 2 * n - 1; ++a) {
      double sum = 0.0;
      for (Eigen::Index q = 0; q < rule.size(); ++q) sum += rule.weights(q) * std::pow(rule.nodes(0, q), a);
      INFO("n ", n, " degree ", a);
      CHECK(std::abs(sum - 1.0 / (a + 1)) < 1e-13);
    }
  }
}

TEST_CASE("Gauss-Legendre rule is not exact beyond 2n") {
  const auto rule = edge_rule(2);
  double sum = 0.0;
  for (Eigen::Index q = 0; q < rule.size(); ++q) sum += rule.weights(q) * std::pow(rule.nodes(0, q), 4);
  CHECK(std::abs(sum - 0.2) > 1e-3);
}

TEST_CASE("tetrahedron rules integrate every monomial up to their order") {
  for (int order = 1; order <= kMaxTetrahedronOrder; ++order) {
    const auto rule = tetrahedron_rule(order);
    for (int a = 0; a <= order; ++a) {
      for (int b = 0; a + b <= order; ++b) {
        for (int c = 0; a + b + c <= order; ++c) {
          double sum = 0.0;
          for (Eigen::Index q = 0; q < rule.size(); ++q) {
            sum += rule.weights(q) * std::pow(rule.nodes(0, q), a) * std::pow(rule.nodes(1, q), b) *
                   std::pow(rule.nodes(2, q), c);
          }
          INFO("order ", order, " monomial ", a, ",", b, ",", c);
          CHECK(std::abs(sum - tet_moment(a, b, c)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("Gauss-Jacobi weights sum to the weight integral") {
  Eigen::VectorXd x, w;
  gauss_jacobi(5, 1.0, 0.0, x, w);
  // int_{-1}^{1} (1 - x) dx = 2
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  // int (1 - x) x dx = -2/3
  CHECK(w.dot(x) == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));
}
