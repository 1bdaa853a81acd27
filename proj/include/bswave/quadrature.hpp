#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "bswave/errors.hpp"

namespace bswave {

/// Quadrature rule on the reference triangle, stored as barycentric points
/// with weights summing to 1, so that  integral over tau = area(tau) * sum
/// w_q f(x_q).  Exact for polynomials up to `degree`.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;  // (l0, l1, l2)
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& x,
                              std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess on [-1,1]
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);  // map to [0,1], ascending
    w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace detail

/// Build (and cache) a rule exact to `degree` via the collapsed-square
/// Gauss-Legendre product. Slightly more points than the optimal symmetric
/// rules but exact for every requested degree by construction.
inline const TriangleRule& triangle_rule(int degree) {
  if (degree < 0) throw Error("quadrature degree must be >= 0");
  static std::map<int, TriangleRule> cache;
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  // Integrand degree d becomes degree d+1 in u after the y = v(1-u) map.
  const int nu = (degree + 3) / 2;
  const int nv = (degree + 2) / 2 > 0 ? (degree + 2) / 2 : 1;
  std::vector<double> xu, wu, xv, wv;
  detail::gauss_legendre_01(nu, xu, wu);
  detail::gauss_legendre_01(nv, xv, wv);

  TriangleRule rule;
  rule.degree = degree;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      double u = xu[i];
      double v = xv[j] * (1.0 - u);
      // times 2: normalize so the weights sum to 1 on the unit triangle
      rule.points.push_back({1.0 - u - v, u, v});
      rule.weights.push_back(2.0 * wu[i] * wv[j] * (1.0 - u));
    }
  }
  return cache.emplace(degree, std::move(rule)).first->second;
}

/// Gauss-Legendre rule on [0,1] (used for edge line integrals).
struct SegmentRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
};

inline const SegmentRule& segment_rule(int npoints) {
  static std::map<int, SegmentRule> cache;
  auto it = cache.find(npoints);
  if (it != cache.end()) return it->second;
  SegmentRule rule;
  detail::gauss_legendre_01(npoints, rule.points, rule.weights);
  return cache.emplace(npoints, std::move(rule)).first->second;
}

}  // namespace bswave
