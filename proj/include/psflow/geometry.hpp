#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace psflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
  Point2& operator+=(Point2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  Point2& operator-=(Point2 b) {
    x -= b.x;
    y -= b.y;
    return *this;
  }
  friend bool operator==(Point2, Point2) = default;
};

/// 2-vectors share the point representation.
using Vec2 = Point2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Counter-clockwise rotation by 90 degrees.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double signed_area2(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

inline double triangle_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * std::abs(signed_area2(a, b, c));
}

inline double triangle_diameter(Point2 a, Point2 b, Point2 c) {
  return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a = 0.0, b = 0.0;
  double c = 0.0, d = 0.0;

  static Mat2 columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }
  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double det() const { return a * d - b * c; }
  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 inverse() const {
    const double dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
};

/// Gradients of the three barycentric coordinates of a counter-clockwise triangle.
inline std::array<Vec2, 3> barycentric_gradients(Point2 p0, Point2 p1, Point2 p2) {
  const double two_area = signed_area2(p0, p1, p2);
  return {rot90(p2 - p1) / two_area, rot90(p0 - p2) / two_area, rot90(p1 - p0) / two_area};
}

}  // namespace psflow
