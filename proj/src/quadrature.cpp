#include "psflow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "psflow/error.hpp"

namespace psflow {

const QuadratureRule& triangle_rule_degree4() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    r.degree = 4;
    constexpr double a1 = 0.445948490915964886;
    constexpr double w1 = 0.223381589678011466;
    constexpr double a2 = 0.091576213509770743;
    constexpr double w2 = 0.109951743655321868;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      r.points.push_back({a, a, b});
      r.points.push_back({a, b, a});
      r.points.push_back({b, a, a});
      r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
  }();
  return rule;
}

namespace {

// Roots of P_n by Newton iteration from the Chebyshev guesses.
LineRule make_gauss_legendre(int n) {
  LineRule r;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points.push_back(0.5 * (1.0 - x));
    r.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

}  // namespace

const LineRule& gauss_legendre(int n) {
  static const std::array<LineRule, 8> rules = [] {
    std::array<LineRule, 8> rs;
    for (int i = 0; i < 8; ++i) rs[i] = make_gauss_legendre(i + 1);
    return rs;
  }();
  if (n < 1 || n > 8) throw Error(ErrorCode::kInvalidArgument, "Gauss-Legendre order must be 1..8");
  return rules[n - 1];
}

double integrate_triangle(const QuadratureRule& rule, Point2 a, Point2 b, Point2 c,
                          const std::function<double(Point2)>& f) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * f(barycentric_point(rule.points[q], a, b, c));
  return sum * triangle_area(a, b, c);
}

double integrate_segment(const LineRule& rule, Point2 a, Point2 b, const std::function<double(Point2)>& f) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * f(a + rule.points[q] * (b - a));
  return sum * distance(a, b);
}

}  // namespace psflow
