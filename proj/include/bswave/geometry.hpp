#pragma once

#include <cmath>

namespace bswave {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  /// z-component of the 2D cross product.
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Axis-aligned bounding box used by point location.
struct BBox {
  double xmin, ymin, xmax, ymax;
  bool contains(Vec2 p, double tol) const {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol &&
           p.y <= ymax + tol;
  }
};

}  // namespace bswave
