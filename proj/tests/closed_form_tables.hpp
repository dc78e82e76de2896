#pragma once

#include <array>

#include "psflow/ps_split.hpp"
#include "psflow/velocity_basis.hpp"

namespace psflow::fixtures {

// Columns: center, point on x=0, point on y=0, point on x+y=1, then the three vertices.
inline constexpr std::array<int, kLocalPoints> kColumnToLocal = {kCenter,  kEdge20,  kEdge01, kEdge12,
                                                                kVertex0, kVertex1, kVertex2};

struct Rows {
  std::array<double, 7> u1, v1, u2, v2, u3, v3;
};

inline std::array<LocalTable, 3> to_tables(const Rows& r) {
  std::array<LocalTable, 3> out{};
  for (int c = 0; c < kLocalPoints; ++c) {
    const int p = kColumnToLocal[c];
    out[0][p] = {r.u1[c], r.v1[c]};
    out[1][p] = {r.u2[c], r.v2[c]};
    out[2][p] = {r.u3[c], r.v3[c]};
  }
  return out;
}

/// Closed-form reference functions of vertex j (0, 1, 2), in LocalPoint order.
inline std::array<LocalTable, 3> closed_form_reference(const ReferenceGeometry& g, int j) {
  const double xc = g.center.x, yc = g.center.y;
  const double y1 = g.singular[0].y;
  const double x2 = g.singular[1].x;
  const double x3 = g.singular[2].x, y3 = g.singular[2].y;
  const double d = 1.0 - xc - yc;
  Rows r{};
  if (j == 0) {
    r.u1 = {-yc, -y1, 1 - x2, 0, 1, 0, 0};
    r.v1 = {yc, (y1 - yc) / xc, 0, 0, 0, 0, 0};
    r.u2 = {xc, 0, (x2 - xc) / yc, 0, 0, 0, 0};
    r.v2 = {-xc, 1 - y1, -x2, 0, 1, 0, 0};
    r.u3 = {-2, -2, 2 * (xc - x2) / yc, 0, 0, 0, 0};
    r.v3 = {2, 2 * (y1 - yc) / xc, 2, 0, 0, 0, 0};
  } else if (j == 1) {
    r.u1 = {0, 0, x2, x3 + (xc - x3) / d, 0, 1, 0};
    r.v1 = {-yc, 0, 0, (yc - y3) / d, 0, 0, 0};
    r.u2 = {0, 0, (x2 - xc) / yc, (xc - x3) / d, 0, 0, 0};
    r.v2 = {xc - 1, 0, x2 - 1, x3 + (yc - y3) / d, 0, 1, 0};
    r.u3 = {0, 0, 2 * (x2 - xc) / yc, 2 * (xc - x3) / d, 0, 0, 0};
    r.v3 = {-2, 0, -2, 2 * (yc - y3) / d, 0, 0, 0};
  } else {
    r.u1 = {yc - 1, y1 - 1, 0, (y3 - yc) / d - x3, 0, 0, 1};
    r.v1 = {0, (y1 - yc) / xc, 0, (yc - y3) / d, 0, 0, 0};
    r.u2 = {-xc, 0, 0, (xc - x3) / d, 0, 0, 0};
    r.v2 = {0, y1, 0, (x3 - xc) / d - x3, 0, 0, 1};
    r.u3 = {2, 2, 0, 2 * (x3 - xc) / d, 0, 0, 0};
    r.v3 = {0, 2 * (yc - y1) / xc, 0, 2 * (y3 - yc) / d, 0, 0, 0};
  }
  return to_tables(r);
}

}  // namespace psflow::fixtures
