#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kgl/rational.hpp"

namespace kgl {

using IndexPair = std::pair<int, int>;

/// Line a1 n1 + a2 n2 = m carrying a compact face, with gcd(a1, a2) = 1.
struct FaceLine {
  int a1 = 0;
  int a2 = 0;
  int m = 0;
  IndexPair from;
  IndexPair to;
};

/// Newton polygon conv(support + R^2_+) of a bivariate power series.
struct NewtonPolyhedron {
  std::vector<IndexPair> support;
  /// Vertices of the Newton diagram ordered by increasing n1.
  std::vector<IndexPair> hull_vertices;
  Rational newton_distance;
  /// Compact face containing (d, d), absent when the diagonal meets a vertex
  /// that is the endpoint of an unbounded face only.
  std::optional<FaceLine> diagonal_face;
};

/// Builds the polygon from a support set. Throws InsufficientDataError on an
/// empty support.
NewtonPolyhedron build_newton_polyhedron(std::vector<IndexPair> support);

/// inf { t : (t, t) in conv(support + R^2_+) }, exact.
Rational newton_distance_of(const std::vector<IndexPair>& support);

}  // namespace kgl
