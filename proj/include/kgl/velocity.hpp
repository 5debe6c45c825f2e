#pragma once

#include <array>
#include <memory>
#include <string>

#include "kgl/curve.hpp"
#include "kgl/types.hpp"

namespace kgl {

using VelocityPoint = Vec2;

/// The two closed components of the degenerate curve Phi_1 in k-space:
/// the loop around the origin and the loop around (pi, pi), the latter
/// lifted into (0, 2 pi)^2. Both are oriented counterclockwise.
///
/// In wave mode the origin loop degenerates to the single point k = 0; it
/// is returned as n_points copies of the origin.
std::array<CurvePolyline, 2> trace_phi1(const LatticeParams& p, int n_points);

/// Caustic curves Psi_1 (outer, convex) and Psi_2 (four cusps), positively
/// oriented in the velocity plane.
std::array<CurvePolyline, 2> psi_curves(const LatticeParams& p, int n_points);

/// grad gamma at the four cusp preimages, in kstar_points order.
std::array<VelocityPoint, 4> v3_points(const LatticeParams& p);

/// sup |grad gamma| over the torus.
double max_group_speed(const LatticeParams& p);

/// Phi_1 loops together with their images, index aligned:
/// psi[j].points[i] = grad gamma(phi[j].points[i]) (except the wave-mode
/// origin loop, whose image is the limiting ellipse).
struct VelocityAtlas {
  LatticeParams params;
  std::array<CurvePolyline, 2> phi;
  std::array<CurvePolyline, 2> psi;
  std::array<VelocityPoint, 4> v3;
  double max_speed = 0.0;
};

VelocityAtlas build_atlas(const LatticeParams& p, int n_points);

/// Shared, immutable atlas with 1024 vertices per curve, memoised by the
/// exact parameter bits. Safe to call concurrently.
std::shared_ptr<const VelocityAtlas> cached_atlas(const LatticeParams& p);

/// Velocity of the Psi_2 arc midpoint on the positive v2 axis, image of the
/// Phi_1 point (pi, arccos B_F(-1)).
VelocityPoint psi2_axis_point(const LatticeParams& p);

/// Velocity of Psi_1 on the positive v2 axis (light-cone edge).
VelocityPoint psi1_axis_point(const LatticeParams& p);

enum class Region { NearV3, NearV2, Interior, Exterior };

std::string to_string(Region r);

struct RegionTag {
  Region region = Region::Interior;
  double dist_v3 = 0.0;       // to the nearest cusp
  double dist_caustic = 0.0;  // to Psi_1 union Psi_2
  double dist_v1 = 0.0;       // to the closed region bounded by Psi_1
};

/// Case split of the dispersive estimate, in velocity units.
RegionTag classify_velocity(const VelocityAtlas& atlas, const VelocityPoint& v, double delta);
RegionTag classify_velocity(const LatticeParams& p, const VelocityPoint& v, double delta);

/// Euclidean distance from v to the closed light-cone region (zero inside).
double distance_to_light_cone(const VelocityAtlas& atlas, const VelocityPoint& v);

}  // namespace kgl
