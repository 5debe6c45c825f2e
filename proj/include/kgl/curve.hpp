#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kgl/types.hpp"

namespace kgl {

enum class CurveLabel {
  Gamma1_1,
  Gamma1_2,
  Gamma2_1,
  Gamma2_2,
  Phi1_origin_loop,
  Phi1_pi_loop,
  Psi1,
  Psi2,
};

std::string to_string(CurveLabel label);

/// Ordered samples of a plane curve. Closed curves do not repeat the first
/// vertex at the end; the closing edge is implicit.
struct CurvePolyline {
  std::vector<Vec2> points;
  bool closed = false;
  CurveLabel label = CurveLabel::Psi1;

  std::size_t size() const { return points.size(); }
  std::size_t edge_count() const {
    if (points.size() < 2) return 0;
    return closed ? points.size() : points.size() - 1;
  }
  Vec2 edge(std::size_t i) const {
    return points[(i + 1) % points.size()] - points[i];
  }
  double max_step() const;
  double length() const;
};

/// Euclidean distance from v to the polyline (segment-wise projection).
double distance_to_polyline(const Vec2& v, const CurvePolyline& curve);

/// Winding number of a closed polyline about v.
int winding_number(const CurvePolyline& curve, const Vec2& v);

/// Vertices where the direction of travel turns by more than 90 degrees.
std::vector<std::size_t> cusp_vertices(const CurvePolyline& curve);

/// True when every non-degenerate turn of a closed polyline has one sign.
bool is_convex(const CurvePolyline& curve, double tol = 0.0);

/// Minimum distance between two polylines (vertex-to-segment both ways).
double polyline_separation(const CurvePolyline& a, const CurvePolyline& b);

/// CSV rows "label,index,c1,c2" (no header).
void write_polyline_rows(std::ostream& os, const CurvePolyline& curve);

}  // namespace kgl
