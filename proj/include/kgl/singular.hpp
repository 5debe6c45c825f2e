#pragma once

#include <array>
#include <optional>

#include "kgl/curve.hpp"
#include "kgl/jet.hpp"
#include "kgl/newton_polygon.hpp"
#include "kgl/types.hpp"

namespace kgl {

// ---------------------------------------------------------------------------
// Degenerate curves in the (a, b) = (cos k1, cos k2) square.

/// The unique b in [-1, 1] with F(a, b) = 0, if any.
std::optional<double> solve_BF(const LatticeParams& p, double a);

/// Root of G(a, b) = 0 on the arc through the second and fourth quadrants,
/// i.e. sign(b) = -sign(a) and b(0) = 0. Empty outside the arc's a-range.
std::optional<double> solve_BG(const LatticeParams& p, double a);

/// Non-origin intersection of Gamma_1 and Gamma_2 ((0,0) when lambda1 ==
/// lambda2). Throws ConvergenceError if bracketing fails.
ABPoint find_astar(const LatticeParams& p);

/// Root in (-1/3, 1) of lambda1 (1-a)^2 (1+2a) = lambda2 (1+3a)^2 together
/// with b = -a / (1 + 2a): the omega = 0 cusp preimage in closed form.
ABPoint astar_wave_closed_form(double lambda1, double lambda2);

/// Preimages (+-arccos a*, +-arccos b*) in the order (+,+), (-,+), (-,-), (+,-).
std::array<TorusPoint, 4> kstar_points(const LatticeParams& p);

/// Sampled arcs of Gamma_1 (labels Gamma1_1, Gamma1_2) and Gamma_2
/// (Gamma2_1, Gamma2_2), each with n points in the (a, b) square.
std::array<CurvePolyline, 2> sample_gamma1(const LatticeParams& p, int n);
std::array<CurvePolyline, 2> sample_gamma2(const LatticeParams& p, int n);

// ---------------------------------------------------------------------------
// Local classification on the torus.

/// Scale-free distance estimate |F| / |grad_k F| from k to Phi_1.
double phi1_residual(const LatticeParams& p, const Vec2& k);

/// Unit vector spanning ker D^2 gamma(k) for k on Phi_1. Throws
/// NotOnCurveError when phi1_residual exceeds tol.
Vec2 zero_eigvec(const LatticeParams& p, const Vec2& k, double tol = 1e-8);

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

enum class DegeneracyKind { K1, K2, K3 };

std::string to_string(DegeneracyKind kind);

struct DegeneracyClass {
  DegeneracyKind kind = DegeneracyKind::K1;
  double det_residual = 0.0;    // phi1_residual(k)
  double third_residual = 0.0;  // |d^3_xi gamma| / gamma, zero for K1
};

inline constexpr double kDefaultTolDet = 1e-8;
inline constexpr double kDefaultTolThird = 1e-6;

DegeneracyClass classify_k(const LatticeParams& p, const Vec2& k,
                           double tol_det = kDefaultTolDet,
                           double tol_third = kDefaultTolThird);

/// (d^3_xi gamma(k), d_xi det D^2 gamma(k)) with xi the unit zero
/// eigenvector. Both vanish exactly on K*.
struct ThirdDerivativePair {
  double third = 0.0;
  double det_derivative = 0.0;
};
ThirdDerivativePair third_der_equiv_check(const LatticeParams& p, const Vec2& k,
                                          double tol = 1e-8);

/// Gradient of det D^2 gamma (closed form).
Vec2 hessian_det_gradient(const LatticeParams& p, const Vec2& k);

// ---------------------------------------------------------------------------
// Taylor tables and Newton polygons.

inline constexpr int kMaxTaylorOrder = 6;
using PhaseJet = Jet2<kMaxTaylorOrder>;

/// Taylor coefficients of phi_v(k* + y1 xi_perp + y2 xi) - phi_v(k*) with
/// v = grad gamma(k*) in the orthonormal Hessian eigenframe; xi spans the
/// eigenvalue of smallest modulus.
struct TaylorTable {
  Vec2 kstar = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 xi_perp = Vec2::UnitX();
  Vec2 xi = Vec2::UnitY();
  double constant = 0.0;  // phi_v(k*)
  int max_order = 4;
  PhaseJet coeffs;

  double operator()(int n, int m) const { return coeffs(n, m); }
};

TaylorTable taylor_table(const LatticeParams& p, const Vec2& kstar, int max_order = 4);

/// Taylor jet of gamma at k along the frame (e1, e2).
PhaseJet gamma_jet(const LatticeParams& p, const Vec2& k, const Vec2& e1, const Vec2& e2);

inline constexpr double kTaylorCutoff = 1e-9;

NewtonPolyhedron newton_polyhedron(const TaylorTable& table, double cutoff = kTaylorCutoff);
Rational newton_distance(const TaylorTable& table, double cutoff = kTaylorCutoff);

/// d^4_xi gamma d^2_xiperp gamma - 3 (d^2_xi d_xiperp gamma)^2 at the first
/// K* point, raw and divided by gamma(k*)^2.
struct K3Discriminant {
  double value = 0.0;
  double normalized = 0.0;
  TorusPoint kstar;
};
K3Discriminant k3_discriminant(const LatticeParams& p);

}  // namespace kgl
