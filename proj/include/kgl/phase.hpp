#pragma once

#include <complex>

#include "kgl/types.hpp"

namespace kgl {

/// gamma^2(k) = omega^2 + 2 lambda1 (1 - cos k1) + 2 lambda2 (1 - cos k2).
/// Generic in the scalar so that it evaluates on reals, complex shifts of
/// the torus and Taylor jets alike.
template <class Scalar>
Scalar gamma_squared(const LatticeParams& p, const Scalar& k1, const Scalar& k2) {
  // 2 (1 - cos k) = 4 sin^2(k / 2) avoids cancellation near k = 0.
  using std::sin;
  const Scalar h1 = sin(0.5 * k1);
  const Scalar h2 = sin(0.5 * k2);
  return p.omega() * p.omega() + 4.0 * p.lambda1() * (h1 * h1) +
         4.0 * p.lambda2() * (h2 * h2);
}

template <class Scalar>
Scalar gamma(const LatticeParams& p, const Scalar& k1, const Scalar& k2) {
  using std::sqrt;
  return sqrt(gamma_squared(p, k1, k2));
}

/// gamma^2 in the (a, b) = (cos k1, cos k2) variables.
inline double gamma_squared_ab(const LatticeParams& p, const ABPoint& ab) {
  return p.omega() * p.omega() + 2.0 * p.lambda1() * (1.0 - ab.a) +
         2.0 * p.lambda2() * (1.0 - ab.b);
}

double gamma(const LatticeParams& p, const TorusPoint& k);
double gamma(const LatticeParams& p, const Vec2& k);

/// Group velocity (lambda1 sin k1, lambda2 sin k2) / gamma(k).
/// Throws SingularOriginError at k = 0 in wave mode.
Vec2 grad_gamma(const LatticeParams& p, const Vec2& k);
inline Vec2 grad_gamma(const LatticeParams& p, const TorusPoint& k) {
  return grad_gamma(p, k.vec());
}

SymMatrix2 hessian_gamma(const LatticeParams& p, const Vec2& k);
inline SymMatrix2 hessian_gamma(const LatticeParams& p, const TorusPoint& k) {
  return hessian_gamma(p, k.vec());
}

/// det D^2 gamma = lambda1 lambda2 F(a, b) / gamma^4.
double hessian_det(const LatticeParams& p, const Vec2& k);

/// F(a,b) = ab omega^2 - lambda1 b (1-a)^2 - lambda2 a (1-b)^2; its sign is
/// the sign of det D^2 gamma.
double F_value(const LatticeParams& p, const ABPoint& ab);
double F_da(const LatticeParams& p, const ABPoint& ab);
double F_db(const LatticeParams& p, const ABPoint& ab);

/// G(a,b) = omega^2 a^3 b^3 + lambda1 b^3 (1 - 3a^2 + 2a^3)
///        + lambda2 a^3 (1 - 3b^2 + 2b^3).
double G_value(const LatticeParams& p, const ABPoint& ab);
double G_da(const LatticeParams& p, const ABPoint& ab);
double G_db(const LatticeParams& p, const ABPoint& ab);

/// lambda1 b^3 (1-a^2)^2 + lambda2 a^3 (1-b^2)^2; agrees with G on Gamma_1.
double G_tilde(const LatticeParams& p, const ABPoint& ab);

/// F as a function on the torus and its k-gradient.
double F_of_k(const LatticeParams& p, const Vec2& k);
Vec2 F_grad_k(const LatticeParams& p, const Vec2& k);

/// Continuous branch of sqrt(gamma^2(k + i mu)) with positive real part.
/// Throws BranchCutError when gamma^2 lands on the closed negative real axis.
std::complex<double> gamma_complex(const LatticeParams& p, const Vec2& k,
                                   const Vec2& mu);

/// max over a k-grid of |Im gamma(k + i mu)| and |gamma(k + i mu)|.
struct ComplexGammaBounds {
  double max_imag = 0.0;
  double max_abs = 0.0;
};
ComplexGammaBounds complex_gamma_extrema(const LatticeParams& p, const Vec2& mu,
                                         int grid = 128);

}  // namespace kgl
