#include "kgl/phase.hpp"

#include <algorithm>

namespace kgl {

double gamma(const LatticeParams& p, const TorusPoint& k) { return gamma(p, k.vec()); }

double gamma(const LatticeParams& p, const Vec2& k) {
  return std::sqrt(gamma_squared(p, k.x(), k.y()));
}

Vec2 grad_gamma(const LatticeParams& p, const Vec2& k) {
  const double g = gamma(p, k);
  if (g == 0.0) {
    throw SingularOriginError("grad_gamma: gamma vanishes at k = 0 in wave mode");
  }
  return Vec2(p.lambda1() * std::sin(k.x()), p.lambda2() * std::sin(k.y())) / g;
}

SymMatrix2 hessian_gamma(const LatticeParams& p, const Vec2& k) {
  const double g2 = gamma_squared(p, k.x(), k.y());
  if (g2 == 0.0) {
    throw SingularOriginError("hessian_gamma: gamma vanishes at k = 0 in wave mode");
  }
  const double g3 = g2 * std::sqrt(g2);
  const double a = std::cos(k.x()), b = std::cos(k.y());
  const double s1 = std::sin(k.x()), s2 = std::sin(k.y());
  const double l1 = p.lambda1(), l2 = p.lambda2();
  return {(l1 * a * g2 - l1 * l1 * s1 * s1) / g3, -l1 * l2 * s1 * s2 / g3,
          (l2 * b * g2 - l2 * l2 * s2 * s2) / g3};
}

double hessian_det(const LatticeParams& p, const Vec2& k) {
  const double g2 = gamma_squared(p, k.x(), k.y());
  return p.lambda1() * p.lambda2() * F_of_k(p, k) / (g2 * g2);
}

double F_value(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b, w2 = p.omega() * p.omega();
  return a * b * w2 - p.lambda1() * b * (1 - a) * (1 - a) -
         p.lambda2() * a * (1 - b) * (1 - b);
}

double F_da(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b, w2 = p.omega() * p.omega();
  return b * w2 + 2 * p.lambda1() * b * (1 - a) - p.lambda2() * (1 - b) * (1 - b);
}

double F_db(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b, w2 = p.omega() * p.omega();
  return a * w2 - p.lambda1() * (1 - a) * (1 - a) + 2 * p.lambda2() * a * (1 - b);
}

double G_value(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b, w2 = p.omega() * p.omega();
  const double a3 = a * a * a, b3 = b * b * b;
  return w2 * a3 * b3 + p.lambda1() * b3 * (1 - 3 * a * a + 2 * a3) +
         p.lambda2() * a3 * (1 - 3 * b * b + 2 * b3);
}

double G_da(const LatticeParams& p, const ABPoint& ab) {
  return G_db(p.swapped(), ABPoint{ab.b, ab.a});
}

double G_db(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b, w2 = p.omega() * p.omega();
  const double a3 = a * a * a;
  return 3 * w2 * a3 * b * b + 3 * p.lambda1() * b * b * (1 - 3 * a * a + 2 * a3) +
         p.lambda2() * a3 * (-6 * b + 6 * b * b);
}

double G_tilde(const LatticeParams& p, const ABPoint& ab) {
  const double a = ab.a, b = ab.b;
  const double u = 1 - a * a, w = 1 - b * b;
  return p.lambda1() * b * b * b * u * u + p.lambda2() * a * a * a * w * w;
}

double F_of_k(const LatticeParams& p, const Vec2& k) {
  return F_value(p, ABPoint::of(k));
}

Vec2 F_grad_k(const LatticeParams& p, const Vec2& k) {
  const ABPoint ab = ABPoint::of(k);
  return {-F_da(p, ab) * std::sin(k.x()), -F_db(p, ab) * std::sin(k.y())};
}

std::complex<double> gamma_complex(const LatticeParams& p, const Vec2& k,
                                   const Vec2& mu) {
  using C = std::complex<double>;
  const C z = gamma_squared(p, C(k.x(), mu.x()), C(k.y(), mu.y()));
  if (z.real() <= 0.0 && z.imag() == 0.0 && (mu.x() != 0.0 || mu.y() != 0.0)) {
    throw BranchCutError("gamma_complex: gamma^2(k + i mu) on the negative real axis");
  }
  if (z.real() < 0.0 && z.imag() == 0.0) {
    throw BranchCutError("gamma_complex: gamma^2 negative");
  }
  return std::sqrt(z);
}

ComplexGammaBounds complex_gamma_extrema(const LatticeParams& p, const Vec2& mu,
                                         int grid) {
  using C = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  ComplexGammaBounds out;
  for (int i = 0; i < grid; ++i) {
    const double k1 = -pi + 2 * pi * i / grid;
    for (int j = 0; j < grid; ++j) {
      const double k2 = -pi + 2 * pi * j / grid;
      // Any square root works here: only |Im| and |.| are used.
      const C g = std::sqrt(gamma_squared(p, C(k1, mu.x()), C(k2, mu.y())));
      out.max_imag = std::max(out.max_imag, std::abs(g.imag()));
      out.max_abs = std::max(out.max_abs, std::abs(g));
    }
  }
  return out;
}

}  // namespace kgl
