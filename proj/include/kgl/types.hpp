#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "kgl/errors.hpp"

namespace kgl {

using Vec2 = Eigen::Vector2d;

/// Parameters (omega, lambda1, lambda2) of the lattice operator
/// H = -sum_j lambda_j (shift_j + shift_j^{-1} - 2) + omega^2.
/// omega == 0 selects the discrete wave equation.
class LatticeParams {
 public:
  LatticeParams(double omega, double lambda1, double lambda2)
      : omega_(omega), lambda1_(lambda1), lambda2_(lambda2) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !std::isfinite(lambda1) ||
        !std::isfinite(lambda2)) {
      throw ConfigError("lambda1 and lambda2 must be positive and finite");
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
      throw ConfigError("omega must be non-negative and finite");
    }
  }

  double omega() const { return omega_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double lambda(int j) const { return j == 0 ? lambda1_ : lambda2_; }
  bool wave_mode() const { return omega_ == 0.0; }

  /// Parameters with the two coordinate directions exchanged.
  LatticeParams swapped() const { return {omega_, lambda2_, lambda1_}; }

  /// Largest value of the dispersion relation, attained at k = (pi, pi).
  double gamma_max() const {
    return std::sqrt(omega_ * omega_ + 4.0 * (lambda1_ + lambda2_));
  }

  bool operator==(const LatticeParams&) const = default;

 private:
  double omega_;
  double lambda1_;
  double lambda2_;
};

/// Reduces an angle into [-pi, pi].
inline double wrap_angle(double k) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(k, 2.0 * pi);
  return r;
}

/// A point of the Brillouin torus, components reduced into [-pi, pi].
struct TorusPoint {
  double k1 = 0.0;
  double k2 = 0.0;

  TorusPoint() = default;
  TorusPoint(double a, double b) : k1(wrap_angle(a)), k2(wrap_angle(b)) {}
  explicit TorusPoint(const Vec2& k) : TorusPoint(k.x(), k.y()) {}

  Vec2 vec() const { return {k1, k2}; }
};

/// Image (cos k1, cos k2) of a torus point.
struct ABPoint {
  double a = 0.0;
  double b = 0.0;

  static ABPoint of(const Vec2& k) { return {std::cos(k.x()), std::cos(k.y())}; }
};

/// Symmetric 2x2 matrix stored by its three independent entries.
struct SymMatrix2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  double det() const { return m11 * m22 - m12 * m12; }
  double trace() const { return m11 + m22; }
  double max_abs() const {
    return std::max({std::abs(m11), std::abs(m12), std::abs(m22)});
  }
  Eigen::Matrix2d dense() const {
    Eigen::Matrix2d m;
    m << m11, m12, m12, m22;
    return m;
  }
  Vec2 operator*(const Vec2& v) const {
    return {m11 * v.x() + m12 * v.y(), m12 * v.x() + m22 * v.y()};
  }
};

}  // namespace kgl
