#include "kgl/velocity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kgl/phase.hpp"
#include "kgl/singular.hpp"

namespace kgl {

namespace {

constexpr double kPi = std::numbers::pi;

double signed_area(const std::vector<Vec2>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    s += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * s;
}

// Newton projection onto F(cos k1, cos k2) = 0 along the gradient.
bool project(const LatticeParams& p, Vec2& k, double tol = 1e-14) {
  for (int it = 0; it < 30; ++it) {
    const double f = F_of_k(p, k);
    const Vec2 g = F_grad_k(p, k);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) return false;
    k -= f / g2 * g;
    if (std::abs(f) / std::sqrt(g2) < tol) return std::abs(F_of_k(p, k)) < 1e-10;
  }
  return std::abs(F_of_k(p, k)) < 1e-10;
}

// Dense predictor-corrector trace of the component through start.
std::vector<Vec2> trace_loop(const LatticeParams& p, Vec2 start) {
  if (!project(p, start)) throw TracingError("trace_phi1: start point not on the curve");
  constexpr double kMaxStep = 0.01;
  constexpr double kMinStep = 1e-7;
  std::vector<Vec2> pts{start};
  Vec2 k = start;
  double h = kMaxStep;
  double travelled = 0.0;
  Vec2 dir = perp(F_grad_k(p, k)).normalized();
  for (int steps = 0; steps < 2'000'000; ++steps) {
    Vec2 trial = k + h * dir;
    const bool ok = project(p, trial);
    const Vec2 new_dir_raw = perp(F_grad_k(p, trial));
    Vec2 new_dir = new_dir_raw.normalized();
    if (new_dir.dot(dir) < 0) new_dir = -new_dir;
    const double moved = (trial - k).norm();
    if (!ok || new_dir.dot(dir) < std::cos(0.1) || moved > 2 * h || new_dir_raw.norm() == 0) {
      h *= 0.5;
      if (h < kMinStep) throw TracingError("trace_phi1: continuation step underflow");
      continue;
    }
    travelled += moved;
    k = trial;
    dir = new_dir;
    if (travelled > 10 * kMaxStep && (k - start).norm() < 1.5 * h) return pts;
    pts.push_back(k);
    h = std::min(kMaxStep, 1.5 * h);
  }
  throw TracingError("trace_phi1: loop did not close");
}

// n vertices spaced evenly in arc length along a dense closed loop.
std::vector<Vec2> resample_closed(const LatticeParams& p, const std::vector<Vec2>& dense, int n) {
  std::vector<double> s(dense.size() + 1, 0.0);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    s[i + 1] = s[i] + (dense[(i + 1) % dense.size()] - dense[i]).norm();
  }
  const double total = s.back();
  std::vector<Vec2> out;
  out.reserve(n);
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double target = total * i / n;
    while (s[j + 1] < target) ++j;
    const double w = (target - s[j]) / std::max(s[j + 1] - s[j], 1e-300);
    Vec2 k = (1 - w) * dense[j] + w * dense[(j + 1) % dense.size()];
    if (!project(p, k)) throw TracingError("trace_phi1: resampled vertex left the curve");
    out.push_back(k);
  }
  return out;
}

double lift(double k) { return k < 0 ? k + 2 * kPi : k; }

}  // namespace

std::array<CurvePolyline, 2> trace_phi1(const LatticeParams& p, int n_points) {
  if (n_points < 64) throw ConfigError("trace_phi1: n_points must be at least 64");
  std::array<CurvePolyline, 2> loops;
  loops[0].label = CurveLabel::Phi1_origin_loop;
  loops[1].label = CurveLabel::Phi1_pi_loop;
  loops[0].closed = loops[1].closed = true;

  if (p.wave_mode()) {
    loops[0].points.assign(n_points, Vec2::Zero());
  } else {
    const double b = *solve_BF(p, 1.0);
    auto pts = resample_closed(p, trace_loop(p, {0.0, std::acos(b)}), n_points);
    if (signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());
    loops[0].points = std::move(pts);
  }

  const double b = *solve_BF(p, -1.0);
  auto pts = resample_closed(p, trace_loop(p, {kPi, std::acos(b)}), n_points);
  if (signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());
  // The cusp preimages become vertices so the caustic has exact cusps.
  for (const TorusPoint& ks : kstar_points(p)) {
    const Vec2 k(lift(ks.k1), lift(ks.k2));
    auto nearest = std::min_element(pts.begin(), pts.end(), [&](const Vec2& x, const Vec2& y) {
      return (x - k).squaredNorm() < (y - k).squaredNorm();
    });
    *nearest = k;
  }
  loops[1].points = std::move(pts);
  return loops;
}

VelocityAtlas build_atlas(const LatticeParams& p, int n_points) {
  VelocityAtlas atlas{p, trace_phi1(p, n_points), {}, v3_points(p), max_group_speed(p)};
  atlas.psi[0].label = CurveLabel::Psi1;
  atlas.psi[1].label = CurveLabel::Psi2;
  for (int j = 0; j < 2; ++j) {
    atlas.psi[j].closed = true;
    if (j == 0 && p.wave_mode()) {
      // Limit of grad gamma as k -> 0 along direction theta.
      for (int i = 0; i < n_points; ++i) {
        const double th = 2 * kPi * i / n_points;
        atlas.psi[0].points.emplace_back(std::sqrt(p.lambda1()) * std::cos(th),
                                         std::sqrt(p.lambda2()) * std::sin(th));
      }
      continue;
    }
    for (const Vec2& k : atlas.phi[j].points) atlas.psi[j].points.push_back(grad_gamma(p, k));
    if (signed_area(atlas.psi[j].points) < 0) {
      std::reverse(atlas.psi[j].points.begin(), atlas.psi[j].points.end());
      std::reverse(atlas.phi[j].points.begin(), atlas.phi[j].points.end());
    }
  }
  return atlas;
}

std::array<CurvePolyline, 2> psi_curves(const LatticeParams& p, int n_points) {
  return build_atlas(p, n_points).psi;
}

std::shared_ptr<const VelocityAtlas> cached_atlas(const LatticeParams& p) {
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const VelocityAtlas>> cache;
  const Key key{std::bit_cast<std::uint64_t>(p.omega()), std::bit_cast<std::uint64_t>(p.lambda1()),
                std::bit_cast<std::uint64_t>(p.lambda2())};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto atlas = std::make_shared<const VelocityAtlas>(build_atlas(p, 1024));
  std::lock_guard lock(mutex);
  return cache.try_emplace(key, std::move(atlas)).first->second;
}

std::array<VelocityPoint, 4> v3_points(const LatticeParams& p) {
  const auto ks = kstar_points(p);
  std::array<VelocityPoint, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = grad_gamma(p, ks[i]);
  return out;
}

double max_group_speed(const LatticeParams& p) {
  // |grad gamma| is even in each k_j, so the quarter [0, pi]^2 suffices.
  auto speed2 = [&](const Vec2& k) {
    if (p.wave_mode() && k.squaredNorm() == 0.0) return 0.0;
    return grad_gamma(p, k).squaredNorm();
  };
  constexpr int kGrid = 64;
  Vec2 best(0, 0);
  double best_v = -1.0;
  for (int i = 0; i <= kGrid; ++i) {
    for (int j = 0; j <= kGrid; ++j) {
      const Vec2 k(kPi * i / kGrid, kPi * j / kGrid);
      const double v = speed2(k);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
  }
  // Compass search from the best grid node.
  double h = kPi / kGrid;
  while (h > 1e-13) {
    bool moved = false;
    for (const Vec2& d : {Vec2(h, 0), Vec2(-h, 0), Vec2(0, h), Vec2(0, -h)}) {
      const Vec2 k = best + d;
      const double v = speed2(k);
      if (v > best_v) {
        best_v = v;
        best = k;
        moved = true;
      }
    }
    if (!moved) h *= 0.5;
  }
  double vmax = std::sqrt(best_v);
  // Without a mass gap the supremum sits at k -> 0 and is not attained.
  if (p.wave_mode()) vmax = std::max(vmax, std::sqrt(std::max(p.lambda1(), p.lambda2())));
  return vmax;
}

VelocityPoint psi2_axis_point(const LatticeParams& p) {
  return grad_gamma(p, Vec2(kPi, std::acos(*solve_BF(p, -1.0))));
}

VelocityPoint psi1_axis_point(const LatticeParams& p) {
  if (p.wave_mode()) return {0.0, std::sqrt(p.lambda2())};
  return grad_gamma(p, Vec2(0.0, std::acos(*solve_BF(p, 1.0))));
}

std::string to_string(Region r) {
  switch (r) {
    case Region::NearV3: return "near_v3";
    case Region::NearV2: return "near_v2";
    case Region::Interior: return "interior";
    case Region::Exterior: return "exterior";
  }
  return "?";
}

double distance_to_light_cone(const VelocityAtlas& atlas, const VelocityPoint& v) {
  if (winding_number(atlas.psi[0], v) != 0) return 0.0;
  return distance_to_polyline(v, atlas.psi[0]);
}

RegionTag classify_velocity(const VelocityAtlas& atlas, const VelocityPoint& v, double delta) {
  if (!(delta > 0.0)) throw ConfigError("classify_velocity: delta must be positive");
  RegionTag tag;
  tag.dist_v3 = std::numeric_limits<double>::infinity();
  for (const auto& c : atlas.v3) tag.dist_v3 = std::min(tag.dist_v3, (v - c).norm());
  tag.dist_caustic = std::min(distance_to_polyline(v, atlas.psi[0]),
                              distance_to_polyline(v, atlas.psi[1]));
  tag.dist_v1 = distance_to_light_cone(atlas, v);
  if (tag.dist_v3 <= delta) {
    tag.region = Region::NearV3;
  } else if (tag.dist_caustic <= delta) {
    tag.region = Region::NearV2;
  } else if (winding_number(atlas.psi[0], v) != 0 || winding_number(atlas.psi[1], v) != 0) {
    tag.region = Region::Interior;
  } else {
    tag.region = Region::Exterior;
  }
  return tag;
}

RegionTag classify_velocity(const LatticeParams& p, const VelocityPoint& v, double delta) {
  return classify_velocity(*cached_atlas(p), v, delta);
}

}  // namespace kgl
