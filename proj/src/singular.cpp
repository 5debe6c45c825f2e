#include "kgl/singular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kgl/phase.hpp"
#include "kgl/roots.hpp"

namespace kgl {

std::optional<double> solve_BF(const LatticeParams& p, double a) {
  if (a == 0.0) return 0.0;
  // F(a, b) = A b^2 + B b + C with C / A = 1: the roots are r and 1/r.
  const double w2 = p.omega() * p.omega();
  const double A = -p.lambda2() * a;
  const double B = a * w2 - p.lambda1() * (1 - a) * (1 - a) + 2 * p.lambda2() * a;
  const double C = A;
  const double disc = B * B - 4 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  if (q == 0.0) return std::nullopt;
  for (double b : {C / q, q / A}) {
    if (std::abs(b) <= 1.0 + 1e-12) return std::clamp(b, -1.0, 1.0);
  }
  return std::nullopt;
}

std::optional<double> solve_BG(const LatticeParams& p, double a) {
  if (a == 0.0) return 0.0;
  auto g = [&](double b) { return G_value(p, {a, b}); };
  const double far = a > 0.0 ? -1.0 : 1.0;
  const double g0 = g(0.0);
  const double g1 = g(far);
  if (g1 == 0.0) return far;
  if ((g0 > 0.0) == (g1 > 0.0)) return std::nullopt;
  return solve_bracketed(g, std::min(0.0, far), std::max(0.0, far));
}

namespace {

// Intersection for lambda1 < lambda2, in the second quadrant.
ABPoint astar_second_quadrant(const LatticeParams& p) {
  // a_hat: left end of the Gamma_2^2 arc, where it meets b = 1.
  const double a_hat = solve_bracketed([&](double a) { return G_value(p, {a, 1.0}); },
                                       -1.0, 0.0);
  auto diff = [&](double a) {
    const auto bf = solve_BF(p, a);
    const auto bg = solve_BG(p, a);
    if (!bf || !bg) throw ConvergenceError("find_astar: Gamma arcs undefined in bracket");
    return *bf - *bg;
  };
  double hi = 0.5 * a_hat;
  int tries = 0;
  while (diff(hi) <= 0.0) {
    hi *= 0.5;
    if (++tries > 200) throw ConvergenceError("find_astar: no sign change near the origin");
  }
  // B_G(a_hat) = 1 > B_F(a_hat); start just inside so rounding in G(a_hat, 1)
  // cannot leave B_G undefined.
  double lo = a_hat;
  double nudge = 1e-14;
  while (!solve_BG(p, lo) || diff(lo) >= 0.0) {
    lo = a_hat * (1 - nudge);
    nudge *= 10;
    if (nudge > 1e-3) throw ConvergenceError("find_astar: bracket lost at a_hat");
  }
  const double a = solve_bracketed(diff, lo, hi);
  ABPoint ab{a, *solve_BF(p, a)};

  // Newton polish on (F, G) jointly.
  for (int it = 0; it < 4; ++it) {
    const double f = F_value(p, ab), g = G_value(p, ab);
    Eigen::Matrix2d J;
    J << F_da(p, ab), F_db(p, ab), G_da(p, ab), G_db(p, ab);
    const Vec2 step = J.fullPivLu().solve(Vec2(f, g));
    const ABPoint trial{ab.a - step.x(), ab.b - step.y()};
    const double before = std::max(std::abs(f), std::abs(g));
    const double after = std::max(std::abs(F_value(p, trial)), std::abs(G_value(p, trial)));
    if (!(after < before)) break;
    ab = trial;
  }
  return ab;
}

}  // namespace

ABPoint find_astar(const LatticeParams& p) {
  if (p.lambda1() == p.lambda2()) return {0.0, 0.0};
  if (p.lambda1() < p.lambda2()) return astar_second_quadrant(p);
  const ABPoint mirrored = astar_second_quadrant(p.swapped());
  return {mirrored.b, mirrored.a};
}

ABPoint astar_wave_closed_form(double lambda1, double lambda2) {
  auto h = [&](double a) {
    return lambda1 * (1 - a) * (1 - a) * (1 + 2 * a) - lambda2 * (1 + 3 * a) * (1 + 3 * a);
  };
  const double a = solve_bracketed(h, -1.0 / 3.0, 1.0);
  return {a, -a / (1 + 2 * a)};
}

std::array<TorusPoint, 4> kstar_points(const LatticeParams& p) {
  const ABPoint ab = find_astar(p);
  const double k1 = std::acos(std::clamp(ab.a, -1.0, 1.0));
  const double k2 = std::acos(std::clamp(ab.b, -1.0, 1.0));
  return {TorusPoint(k1, k2), TorusPoint(-k1, k2), TorusPoint(-k1, -k2),
          TorusPoint(k1, -k2)};
}

namespace {

// Picks n of the candidate points, evenly spaced in arc length.
CurvePolyline select_by_arclength(std::vector<Vec2> pts, int n, CurveLabel label) {
  CurvePolyline out;
  out.label = label;
  out.closed = false;
  if (pts.empty()) return out;
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
  const double total = s.back();
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double target = n > 1 ? total * i / (n - 1) : 0.0;
    while (j + 1 < pts.size() && std::abs(s[j + 1] - target) <= std::abs(s[j] - target)) ++j;
    out.points.push_back(pts[j]);
  }
  return out;
}

// Candidates of a decreasing graph sampled both as b(a) and a(b).
std::vector<Vec2> graph_candidates(const std::function<std::optional<double>(double)>& b_of_a,
                                   const std::function<std::optional<double>(double)>& a_of_b,
                                   double a_lo, double a_hi, double b_lo, double b_hi, int m) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= m; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / m;
    if (auto b = b_of_a(a)) pts.emplace_back(a, *b);
    const double b = b_lo + (b_hi - b_lo) * i / m;
    if (auto a2 = a_of_b(b)) pts.emplace_back(*a2, b);
  }
  std::sort(pts.begin(), pts.end(), [](const Vec2& x, const Vec2& y) {
    return x.x() < y.x() || (x.x() == y.x() && x.y() > y.y());
  });
  return pts;
}

}  // namespace

std::array<CurvePolyline, 2> sample_gamma1(const LatticeParams& p, int n) {
  const LatticeParams q = p.swapped();
  auto b_of_a = [&](double a) { return solve_BF(p, a); };
  auto a_of_b = [&](double b) { return solve_BF(q, b); };
  const int m = 8 * std::max(n, 2);

  // Gamma_1^1 joins (A_F(1), 1) and (1, B_F(1)) in the first quadrant.
  const double a11 = a_of_b(1.0).value_or(1.0);
  const double b11 = b_of_a(1.0).value_or(1.0);
  auto first = graph_candidates(b_of_a, a_of_b, a11, 1.0, b11, 1.0, m);
  std::erase_if(first, [](const Vec2& v) { return v.x() < 0 || v.y() < 0; });

  // Gamma_1^2 joins (-1, B_F(-1)) and (A_F(-1), -1) through the origin.
  const double a12 = a_of_b(-1.0).value_or(0.0);
  const double b12 = b_of_a(-1.0).value_or(0.0);
  auto second = graph_candidates(b_of_a, a_of_b, -1.0, a12, -1.0, b12, m);
  std::erase_if(second, [](const Vec2& v) { return v.x() > 0 && v.y() > 0; });

  return {select_by_arclength(std::move(first), n, CurveLabel::Gamma1_1),
          select_by_arclength(std::move(second), n, CurveLabel::Gamma1_2)};
}

std::array<CurvePolyline, 2> sample_gamma2(const LatticeParams& p, int n) {
  const LatticeParams q = p.swapped();
  const int m = 8 * std::max(n, 2);

  // Gamma_2^1: third quadrant, collected by sign changes of G along a and b.
  std::vector<Vec2> third;
  constexpr int kScan = 64;
  for (int i = 0; i <= m; ++i) {
    const double fixed = -1.0 + 1.0 * i / m;
    for (int pass = 0; pass < 2; ++pass) {
      auto g = [&](double s) {
        return pass == 0 ? G_value(p, {fixed, s}) : G_value(p, {s, fixed});
      };
      for (int j = 0; j < kScan; ++j) {
        const double lo = -1.0 + 1.0 * j / kScan;
        const double hi = -1.0 + 1.0 * (j + 1) / kScan;
        const double glo = g(lo), ghi = g(std::min(hi, -1e-300));
        if ((glo > 0) != (ghi > 0)) {
          const double r = solve_bracketed(g, lo, std::min(hi, -1e-300));
          third.push_back(pass == 0 ? Vec2(fixed, r) : Vec2(r, fixed));
        }
      }
    }
  }
  std::erase_if(third, [](const Vec2& v) { return !(v.x() < 0 && v.y() < 0); });
  std::sort(third.begin(), third.end(), [](const Vec2& x, const Vec2& y) {
    return std::atan2(x.y() + 1, x.x() + 1) > std::atan2(y.y() + 1, y.x() + 1);
  });

  // Gamma_2^2 runs from (a_hat, 1) through the origin to (1, B_G(1)).
  auto b_of_a = [&](double a) { return solve_BG(p, a); };
  auto a_of_b = [&](double b) { return solve_BG(q, b); };
  const double a_hat = a_of_b(1.0).value_or(-1.0);
  const double b_end = b_of_a(1.0).value_or(-1.0);
  auto second = graph_candidates(b_of_a, a_of_b, a_hat, 1.0, b_end, 1.0, m);

  return {select_by_arclength(std::move(third), n, CurveLabel::Gamma2_1),
          select_by_arclength(std::move(second), n, CurveLabel::Gamma2_2)};
}

double phi1_residual(const LatticeParams& p, const Vec2& k) {
  const double f = F_of_k(p, k);
  if (f == 0.0) return 0.0;
  const double g = F_grad_k(p, k).norm();
  return g > 0.0 ? std::abs(f) / g : std::numeric_limits<double>::infinity();
}

Vec2 zero_eigvec(const LatticeParams& p, const Vec2& k, double tol) {
  if (phi1_residual(p, k) > tol) {
    throw NotOnCurveError("zero_eigvec: k is not on the degenerate curve");
  }
  const ABPoint ab = ABPoint::of(k);
  const double s1 = std::sin(k.x()), s2 = std::sin(k.y());
  Vec2 xi(F_da(p, ab), p.lambda1() * s1 * s2);
  const double scale = p.omega() * p.omega() + p.lambda1() + p.lambda2();
  if (xi.norm() < 1e-6 * scale) {
    // sin k1 -> 0 along Phi_1: xi / sin k1 tends to (0, lambda1 sin k2).
    const SymMatrix2 h = hessian_gamma(p, k);
    xi = Vec2(-h.m12, h.m11);
    if (xi.norm() < 1e-6 * scale) xi = Vec2(0.0, 1.0);
  }
  return xi.normalized();
}

std::string to_string(DegeneracyKind kind) {
  switch (kind) {
    case DegeneracyKind::K1: return "K1";
    case DegeneracyKind::K2: return "K2";
    case DegeneracyKind::K3: return "K3";
  }
  return "?";
}

PhaseJet gamma_jet(const LatticeParams& p, const Vec2& k, const Vec2& e1, const Vec2& e2) {
  const PhaseJet k1 = PhaseJet::linear(k.x(), e1.x(), e2.x());
  const PhaseJet k2 = PhaseJet::linear(k.y(), e1.y(), e2.y());
  return gamma(p, k1, k2);
}

DegeneracyClass classify_k(const LatticeParams& p, const Vec2& k, double tol_det,
                           double tol_third) {
  DegeneracyClass out;
  out.det_residual = phi1_residual(p, k);
  if (out.det_residual > tol_det) {
    out.kind = DegeneracyKind::K1;
    return out;
  }
  const Vec2 xi = zero_eigvec(p, k, std::numeric_limits<double>::infinity());
  const PhaseJet g = gamma_jet(p, k, perp(xi), xi);
  out.third_residual = std::abs(6.0 * g(0, 3)) / g.value();
  out.kind = out.third_residual < tol_third ? DegeneracyKind::K3 : DegeneracyKind::K2;
  return out;
}

Vec2 hessian_det_gradient(const LatticeParams& p, const Vec2& k) {
  const double g2 = gamma_squared(p, k.x(), k.y());
  const double g = std::sqrt(g2);
  const double f = F_of_k(p, k);
  const Vec2 grad_f = F_grad_k(p, k);
  const Vec2 grad_g = grad_gamma(p, k);
  return p.lambda1() * p.lambda2() * (grad_f / (g2 * g2) - 4.0 * f * grad_g / (g2 * g2 * g));
}

ThirdDerivativePair third_der_equiv_check(const LatticeParams& p, const Vec2& k, double tol) {
  const Vec2 xi = zero_eigvec(p, k, tol);
  const PhaseJet g = gamma_jet(p, k, perp(xi), xi);
  return {6.0 * g(0, 3), hessian_det_gradient(p, k).dot(xi)};
}

TaylorTable taylor_table(const LatticeParams& p, const Vec2& kstar, int max_order) {
  if (max_order < 2 || max_order > kMaxTaylorOrder) {
    throw ConfigError("taylor_table: max_order must be in [2, 6]");
  }
  TaylorTable t;
  t.kstar = kstar;
  t.max_order = max_order;
  t.velocity = grad_gamma(p, kstar);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(hessian_gamma(p, kstar).dense());
  const auto& ev = eig.eigenvalues();
  const int zero_index = std::abs(ev(0)) <= std::abs(ev(1)) ? 0 : 1;
  t.xi = eig.eigenvectors().col(zero_index).normalized();
  t.xi_perp = perp(t.xi);

  const PhaseJet g = gamma_jet(p, kstar, t.xi_perp, t.xi);
  t.constant = kstar.dot(t.velocity) - g.value();
  t.coeffs = -1.0 * g;
  t.coeffs(0, 0) = 0.0;
  t.coeffs(1, 0) = t.velocity.dot(t.xi_perp) - g(1, 0);
  t.coeffs(0, 1) = t.velocity.dot(t.xi) - g(0, 1);
  for (int d = max_order + 1; d <= kMaxTaylorOrder; ++d) {
    for (int m = 0; m <= d; ++m) t.coeffs(d - m, m) = 0.0;
  }
  return t;
}

NewtonPolyhedron newton_polyhedron(const TaylorTable& table, double cutoff) {
  std::vector<IndexPair> support;
  for (int d = 1; d <= table.max_order; ++d) {
    for (int m = 0; m <= d; ++m) {
      if (std::abs(table(d - m, m)) > cutoff) support.emplace_back(d - m, m);
    }
  }
  return build_newton_polyhedron(std::move(support));
}

Rational newton_distance(const TaylorTable& table, double cutoff) {
  return newton_polyhedron(table, cutoff).newton_distance;
}

K3Discriminant k3_discriminant(const LatticeParams& p) {
  const TorusPoint k = kstar_points(p)[0];
  const TaylorTable t = taylor_table(p, k.vec(), 4);
  // gamma coefficients are the negated phase coefficients from order two on.
  const double d4_xi = -24.0 * t(0, 4);
  const double d2_perp = -2.0 * t(2, 0);
  const double d2xi_dperp = -2.0 * t(1, 2);
  K3Discriminant out;
  out.kstar = k;
  out.value = d4_xi * d2_perp - 3.0 * d2xi_dperp * d2xi_dperp;
  const double g = gamma(p, k);
  out.normalized = out.value / (g * g);
  return out;
}

}  // namespace kgl
