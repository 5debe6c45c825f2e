#include "kgl/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "kgl/csv.hpp"

namespace kgl {

std::string to_string(CurveLabel label) {
  switch (label) {
    case CurveLabel::Gamma1_1: return "Gamma1_1";
    case CurveLabel::Gamma1_2: return "Gamma1_2";
    case CurveLabel::Gamma2_1: return "Gamma2_1";
    case CurveLabel::Gamma2_2: return "Gamma2_2";
    case CurveLabel::Phi1_origin_loop: return "Phi1_origin_loop";
    case CurveLabel::Phi1_pi_loop: return "Phi1_pi_loop";
    case CurveLabel::Psi1: return "Psi1";
    case CurveLabel::Psi2: return "Psi2";
  }
  return "unknown";
}

double CurvePolyline::max_step() const {
  double m = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i) m = std::max(m, edge(i).norm());
  return m;
}

double CurvePolyline::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i) s += edge(i).norm();
  return s;
}

namespace {

double segment_distance(const Vec2& v, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double s = len2 > 0.0 ? (v - a).dot(d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * d - v).norm();
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double distance_to_polyline(const Vec2& v, const CurvePolyline& curve) {
  if (curve.points.empty()) return std::numeric_limits<double>::infinity();
  if (curve.points.size() == 1) return (v - curve.points[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.edge_count(); ++i) {
    best = std::min(best, segment_distance(v, curve.points[i],
                                           curve.points[(i + 1) % curve.size()]));
  }
  return best;
}

int winding_number(const CurvePolyline& curve, const Vec2& v) {
  // Crossing-number form of the winding number (Sunday's algorithm).
  int wn = 0;
  const std::size_t n = curve.size();
  if (n < 3) return 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = curve.points[i];
    const Vec2& b = curve.points[(i + 1) % n];
    const double side = cross2(b - a, v - a);
    if (a.y() <= v.y()) {
      if (b.y() > v.y() && side > 0) ++wn;
    } else {
      if (b.y() <= v.y() && side < 0) --wn;
    }
  }
  return wn;
}

std::vector<std::size_t> cusp_vertices(const CurvePolyline& curve) {
  std::vector<std::size_t> out;
  const std::size_t n = curve.size();
  if (n < 3) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!curve.closed && (i == 0 || i + 1 == n)) continue;
    const Vec2 in = curve.points[i] - curve.points[(i + n - 1) % n];
    const Vec2 out_edge = curve.points[(i + 1) % n] - curve.points[i];
    if (in.dot(out_edge) < 0.0) out.push_back(i);
  }
  return out;
}

bool is_convex(const CurvePolyline& curve, double tol) {
  const std::size_t n = curve.size();
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = curve.edge((i + n - 1) % n);
    const Vec2 e1 = curve.edge(i);
    const double c = cross2(e0, e1);
    if (std::abs(c) <= tol * e0.norm() * e1.norm()) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

double polyline_separation(const CurvePolyline& a, const CurvePolyline& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.points) best = std::min(best, distance_to_polyline(p, b));
  for (const auto& p : b.points) best = std::min(best, distance_to_polyline(p, a));
  return best;
}

void write_polyline_rows(std::ostream& os, const CurvePolyline& curve) {
  const std::string label = to_string(curve.label);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    os << label << ',' << i << ',' << csv::fmt(curve.points[i].x()) << ','
       << csv::fmt(curve.points[i].y()) << '\n';
  }
}

}  // namespace kgl
