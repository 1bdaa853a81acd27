#include <catch_amalgamated.hpp>

#include "bswave/quadrature.hpp"

using namespace bswave;
using Catch::Approx;

namespace {

// integral of x^a y^b over the unit triangle: a! b! / (a+b+2)!
double monomial_integral(int a, int b) {
  double num = 1.0, den = 1.0;
  for (int k = 2; k <= a + b + 2; ++k) den *= k;
  for (int k = 2; k <= a; ++k) num *= k;
  for (int k = 2; k <= b; ++k) num *= k;
  return num / den;
}

}  // namespace

TEST_CASE("rules integrate monomials exactly up to their degree", "[quadrature]") {
  for (int degree : {0, 1, 2, 3, 5, 7, 8, 10, 14, 20}) {
    const TriangleRule& rule = triangle_rule(degree);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == Approx(1.0).epsilon(1e-14));

    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
          double x = rule.points[q][1], y = rule.points[q][2];
          s += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
        }
        // area-normalized: multiply by the reference area 1/2
        INFO("degree " << degree << " monomial x^" << a << " y^" << b);
        CHECK(0.5 * s == Approx(monomial_integral(a, b)).margin(1e-14));
      }
    }
  }
}

TEST_CASE("barycentric coordinates are valid", "[quadrature]") {
  const TriangleRule& rule = triangle_rule(6);
  for (const auto& p : rule.points) {
    CHECK(p[0] >= 0.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[2] >= 0.0);
    CHECK(p[0] + p[1] + p[2] == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("segment rule integrates polynomials", "[quadrature]") {
  const SegmentRule& rule = segment_rule(3);  // exact to degree 5
  for (int d = 0; d <= 5; ++d) {
    double s = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      s += rule.weights[q] * std::pow(rule.points[q], d);
    CHECK(s == Approx(1.0 / (d + 1)).epsilon(1e-14));
  }
}
