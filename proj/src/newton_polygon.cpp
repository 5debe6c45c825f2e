#include "kgl/newton_polygon.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

std::int64_t cross(const IndexPair& o, const IndexPair& a, const IndexPair& b) {
  return static_cast<std::int64_t>(a.first - o.first) * (b.second - o.second) -
         static_cast<std::int64_t>(a.second - o.second) * (b.first - o.first);
}

// Lower-left convex chain of the staircase of minimal support points.
std::vector<IndexPair> diagram_vertices(std::vector<IndexPair> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // Keep points not dominated componentwise by another support point.
  std::vector<IndexPair> minimal;
  int best_n2 = std::numeric_limits<int>::max();
  for (const auto& q : pts) {
    if (q.second < best_n2) {
      minimal.push_back(q);
      best_n2 = q.second;
    }
  }
  // Monotone chain; keep strictly convex turns toward the origin.
  std::vector<IndexPair> chain;
  for (const auto& q : minimal) {
    while (chain.size() >= 2 && cross(chain[chain.size() - 2], chain.back(), q) <= 0) {
      chain.pop_back();
    }
    chain.push_back(q);
  }
  return chain;
}

}  // namespace

Rational newton_distance_of(const std::vector<IndexPair>& support) {
  if (support.empty()) throw InsufficientDataError("newton_distance: empty support");
  // max(z1, z2) is minimized over conv(support) on its boundary, so it is
  // enough to scan points and segments between pairs of points.
  Rational best(std::max(support[0].first, support[0].second));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto& p = support[i];
    best = std::min(best, Rational(std::max(p.first, p.second)));
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      const auto& q = support[j];
      const std::int64_t dp = p.first - p.second;
      const std::int64_t dq = q.first - q.second;
      if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
        // z = s p + (1-s) q with z1 = z2:  s = -dq / (dp - dq)
        const Rational s(-dq, dp - dq);
        const Rational t = s * Rational(p.first) + (Rational(1) - s) * Rational(q.first);
        best = std::min(best, t);
      }
    }
  }
  return best;
}

NewtonPolyhedron build_newton_polyhedron(std::vector<IndexPair> support) {
  if (support.empty()) throw InsufficientDataError("newton_distance: empty support");
  NewtonPolyhedron poly;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  poly.support = support;
  poly.hull_vertices = diagram_vertices(support);
  poly.newton_distance = newton_distance_of(support);

  const Rational d = poly.newton_distance;
  for (std::size_t i = 0; i + 1 < poly.hull_vertices.size(); ++i) {
    const auto& p = poly.hull_vertices[i];
    const auto& q = poly.hull_vertices[i + 1];
    // p has smaller n1 and larger n2 than q.
    if (!(Rational(p.first) <= d && d <= Rational(q.first))) continue;
    if (!(Rational(q.second) <= d && d <= Rational(p.second))) continue;
    int a1 = p.second - q.second;
    int a2 = q.first - p.first;
    const int g = std::gcd(a1, a2);
    a1 /= g;
    a2 /= g;
    const int m = a1 * p.first + a2 * p.second;
    // (d, d) must lie on the line.
    if (Rational(a1 + a2) * d == Rational(m)) {
      poly.diagonal_face = FaceLine{a1, a2, m, p, q};
      break;
    }
  }
  return poly;
}

}  // namespace kgl
