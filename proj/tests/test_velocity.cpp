#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kgl/phase.hpp"
#include "kgl/singular.hpp"
#include "kgl/velocity.hpp"

using namespace kgl;

namespace {

const LatticeParams kParams[] = {{1, 1, 1}, {1, 1, 2}, {0.3, 2.5, 0.8}, {2, 1, 1}};

}  // namespace

TEST_CASE("Phi_1 tracing") {
  for (const LatticeParams& p : kParams) {
    const auto loops = trace_phi1(p, 256);
    for (const auto& loop : loops) {
      CHECK(loop.size() == 256);
      CHECK(loop.closed);
      for (const Vec2& k : loop.points) {
        CHECK(phi1_residual(p, k) < 1e-9);
        CHECK(classify_k(p, k).kind != DegeneracyKind::K1);
      }
    }
    // The pi-loop carries all four cusp preimages.
    for (const TorusPoint& ks : kstar_points(p)) {
      double d = 1e9;
      for (const Vec2& k : loops[1].points) {
        const Vec2 diff = (k - ks.vec()).unaryExpr(
            [](double c) { return std::remainder(c, 2 * std::numbers::pi); });
        d = std::min(d, diff.norm());
      }
      CHECK(d < 1e-6);
    }
  }
  // Equal couplings: both loops are symmetric under k1 <-> k2.
  const LatticeParams p(1, 1.5, 1.5);
  for (const auto& loop : trace_phi1(p, 128)) {
    for (const Vec2& k : loop.points) {
      const Vec2 swapped(k.y(), k.x());
      double d = 1e9;
      for (const Vec2& q : loop.points) d = std::min(d, (q - swapped).norm());
      CHECK(d < loop.max_step());
    }
  }
}

TEST_CASE("caustics") {
  for (const LatticeParams& p : kParams) {
    const VelocityAtlas atlas = build_atlas(p, 512);
    const CurvePolyline& psi1 = atlas.psi[0];
    const CurvePolyline& psi2 = atlas.psi[1];
    CHECK(is_convex(psi1, 1e-14));
    CHECK(cusp_vertices(psi1).empty());
    CHECK(cusp_vertices(psi2).size() == 4);
    CHECK(winding_number(psi2, Vec2::Zero()) == 1);
    CHECK(winding_number(psi1, Vec2::Zero()) == 1);
    CHECK(polyline_separation(psi1, psi2) > 1e-3);

    // Each Psi point is the group velocity of its Phi_1 preimage, and the
    // curve runs along xi_perp away from the cusps.
    const auto cusps2 = cusp_vertices(psi2);
    for (int j = 0; j < 2; ++j) {
      const CurvePolyline& psi = atlas.psi[j];
      const std::size_t n = psi.size();
      for (std::size_t i = 0; i < n; i += 7) {
        const Vec2 k = atlas.phi[j].points[i];
        CHECK((psi.points[i] - grad_gamma(p, k)).norm() < 1e-12);
        bool near_cusp = false;
        for (std::size_t c : (j == 1 ? cusps2 : std::vector<std::size_t>{})) {
          const std::size_t d = (i + n - c) % n;
          near_cusp = near_cusp || std::min(d, n - d) < 4;
        }
        if (near_cusp) continue;
        const Vec2 xp = perp(zero_eigvec(p, k));
        CHECK(std::abs(psi.edge(i).normalized().dot(xp)) > 0.99);
      }
    }

    // Arcs of Psi_2 between cusps turn one way only.
    const auto cusps = cusp_vertices(psi2);
    const std::size_t n = psi2.size();
    for (std::size_t c = 0; c < 4; ++c) {
      const std::size_t from = cusps[c] + 2, to = cusps[(c + 1) % 4] + n - 2;
      int pos = 0, neg = 0;
      for (std::size_t i = from; i < to && (i % n) != cusps[(c + 1) % 4]; ++i) {
        const Vec2 e0 = psi2.edge((i - 1) % n), e1 = psi2.edge(i % n);
        const double cross = e0.x() * e1.y() - e0.y() * e1.x();
        (cross > 0 ? pos : neg) += std::abs(cross) > 1e-14 ? 1 : 0;
      }
      CHECK(std::min(pos, neg) == 0);
    }

    for (const Vec2& v : atlas.v3) CHECK(distance_to_polyline(v, psi2) < psi2.max_step());
  }
}

TEST_CASE("cusps") {
  const auto unit = v3_points(LatticeParams(0, 1, 1));
  for (const Vec2& v : unit) {
    CHECK(std::abs(std::abs(v.x()) - 0.5) < 1e-10);
    CHECK(std::abs(std::abs(v.y()) - 0.5) < 1e-10);
  }
  for (const Vec2& v : v3_points(LatticeParams(1, 1, 1))) {
    CHECK(std::abs(v.x()) == doctest::Approx(std::abs(v.y())).epsilon(1e-12));
  }
  const ABPoint c = astar_wave_closed_form(1, 4);
  const Vec2 closed(std::sqrt(1 + 3 * c.a) / 2, std::sqrt(1 + 3 * c.b) / 2 * 2);
  const Vec2 v = v3_points(LatticeParams(0, 1, 4))[0].cwiseAbs();
  CHECK((v - closed).norm() < 1e-10);
}

TEST_CASE("maximal group speed") {
  for (const LatticeParams& p : kParams) {
    const VelocityAtlas atlas = build_atlas(p, 1024);
    double best = 0;
    for (const Vec2& v : atlas.psi[0].points) best = std::max(best, v.norm());
    CHECK(atlas.max_speed == doctest::Approx(best).epsilon(1e-6));
  }
  CHECK(max_group_speed(LatticeParams(1, 1, 1)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(max_group_speed(LatticeParams(0, 1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = 0;
  for (double l1 = 0.25; l1 <= 4.0; l1 *= 1.5) {
    const double s = max_group_speed(LatticeParams(1, l1, 1));
    CHECK(s >= prev - 1e-12);
    prev = s;
  }
  for (double w : {10.0, 100.0, 1000.0}) {
    CHECK(max_group_speed(LatticeParams(w, 1, 2)) <= 3.0 / w);
  }
}

TEST_CASE("region classification") {
  const LatticeParams p(1, 1, 1);
  const auto atlas = cached_atlas(p);
  CHECK(classify_velocity(*atlas, Vec2::Zero(), 0.05).region == Region::Interior);
  CHECK(classify_velocity(*atlas, 1.5 * atlas->max_speed * Vec2(1, 0), 0.05).region == Region::Exterior);
  for (const Vec2& v : atlas->v3) {
    CHECK(classify_velocity(*atlas, v, 1e-6).region == Region::NearV3);
  }
  CHECK(classify_velocity(*atlas, psi2_axis_point(p), 0.05).region == Region::NearV2);
  CHECK(classify_velocity(*atlas, psi1_axis_point(p), 0.05).region == Region::NearV2);
  for (double x = -0.8; x <= 0.8; x += 0.13) {
    for (double y = -0.8; y <= 0.8; y += 0.11) {
      const Region r = classify_velocity(*atlas, Vec2(x, y), 0.05).region;
      CHECK(classify_velocity(*atlas, Vec2(-x, y), 0.05).region == r);
      CHECK(classify_velocity(*atlas, Vec2(x, -y), 0.05).region == r);
      CHECK(classify_velocity(*atlas, Vec2(-x, -y), 0.05).region == r);
    }
  }
  CHECK(distance_to_light_cone(*atlas, Vec2::Zero()) == 0.0);
  CHECK(distance_to_light_cone(*atlas, Vec2(2, 0)) ==
        doctest::Approx(2 - psi1_axis_point(p).norm()).epsilon(1e-3));
}
