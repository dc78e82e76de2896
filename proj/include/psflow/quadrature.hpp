#pragma once

#include <array>
#include <functional>
#include <vector>

#include "psflow/geometry.hpp"

namespace psflow {

/// Triangle rule in barycentric coordinates; weights sum to 1.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric 6-point rule, exact for polynomials of degree 4.
const QuadratureRule& triangle_rule_degree4();

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre on [0, 1] (n = 1..8); exact to degree 2n - 1.
const LineRule& gauss_legendre(int n);

inline Point2 barycentric_point(const std::array<double, 3>& l, Point2 a, Point2 b, Point2 c) {
  return l[0] * a + l[1] * b + l[2] * c;
}

/// Integral of f over triangle (a, b, c).
double integrate_triangle(const QuadratureRule& rule, Point2 a, Point2 b, Point2 c,
                          const std::function<double(Point2)>& f);

/// Integral of f over the segment a -> b (arc length measure).
double integrate_segment(const LineRule& rule, Point2 a, Point2 b, const std::function<double(Point2)>& f);

}  // namespace psflow
