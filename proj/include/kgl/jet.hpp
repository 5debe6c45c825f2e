#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace kgl {

/// Truncated bivariate Taylor series sum_{n+m<=Order} c(n,m) y1^n y2^m.
/// Arithmetic is exact up to the truncation order, so composing analytic
/// functions on jets yields Taylor coefficients to working precision.
template <int Order>
class Jet2 {
 public:
  static constexpr int order = Order;
  static constexpr std::size_t size = (Order + 1) * (Order + 2) / 2;

  Jet2() { c_.fill(0.0); }
  Jet2(double constant) {  // NOLINT: implicit promotion keeps formulas generic
    c_.fill(0.0);
    c_[0] = constant;
  }

  /// value + dy1 * y1 + dy2 * y2
  static Jet2 linear(double value, double dy1, double dy2) {
    Jet2 j(value);
    j(1, 0) = dy1;
    j(0, 1) = dy2;
    return j;
  }

  static constexpr std::size_t index(int n, int m) {
    const int d = n + m;
    return static_cast<std::size_t>(d * (d + 1) / 2 + m);
  }

  double& operator()(int n, int m) { return c_[index(n, m)]; }
  double operator()(int n, int m) const { return c_[index(n, m)]; }
  double value() const { return c_[0]; }

  Jet2& operator+=(const Jet2& o) {
    for (std::size_t i = 0; i < size; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    for (std::size_t i = 0; i < size; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet2& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator-(Jet2 a) { return a *= -1.0; }
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(Jet2 a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet2 operator+(double s, Jet2 a) { return a + s; }
  friend Jet2 operator-(Jet2 a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet2 operator-(double s, Jet2 a) { return (-a) + s; }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    for (int d1 = 0; d1 <= Order; ++d1) {
      for (int m1 = 0; m1 <= d1; ++m1) {
        const double x = a(d1 - m1, m1);
        if (x == 0.0) continue;
        for (int d2 = 0; d1 + d2 <= Order; ++d2) {
          for (int m2 = 0; m2 <= d2; ++m2) {
            r(d1 - m1 + d2 - m2, m1 + m2) += x * b(d2 - m2, m2);
          }
        }
      }
    }
    return r;
  }

  /// Nilpotent part (constant term removed).
  Jet2 tail() const {
    Jet2 r = *this;
    r.c_[0] = 0.0;
    return r;
  }

 private:
  std::array<double, size> c_;
};

namespace detail {

// sum_j coeffs[j] * u^j for a jet u with zero constant term.
template <int Order, class Coeff>
Jet2<Order> nilpotent_series(const Jet2<Order>& u, Coeff coeff) {
  Jet2<Order> result(coeff(0));
  Jet2<Order> power(1.0);
  for (int j = 1; j <= Order; ++j) {
    power = power * u;
    result += power * coeff(j);
  }
  return result;
}

}  // namespace detail

template <int Order>
Jet2<Order> cos(const Jet2<Order>& x) {
  const double c0 = std::cos(x.value());
  const double s0 = std::sin(x.value());
  // cos(x0 + u) = cos x0 cos u - sin x0 sin u
  return detail::nilpotent_series(x.tail(), [&](int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    switch (j % 4) {
      case 0: return c0 / f;
      case 1: return -s0 / f;
      case 2: return -c0 / f;
      default: return s0 / f;
    }
  });
}

template <int Order>
Jet2<Order> sin(const Jet2<Order>& x) {
  const double c0 = std::cos(x.value());
  const double s0 = std::sin(x.value());
  return detail::nilpotent_series(x.tail(), [&](int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    switch (j % 4) {
      case 0: return s0 / f;
      case 1: return c0 / f;
      case 2: return -s0 / f;
      default: return -c0 / f;
    }
  });
}

template <int Order>
Jet2<Order> sqrt(const Jet2<Order>& x) {
  const double x0 = x.value();
  const double r0 = std::sqrt(x0);
  // sqrt(x0 (1 + u)) with u = tail / x0, binomial series of exponent 1/2.
  Jet2<Order> u = x.tail() * (1.0 / x0);
  return detail::nilpotent_series(u, [&](int j) {
    double b = 1.0;
    for (int i = 0; i < j; ++i) b *= (0.5 - i) / (i + 1);
    return r0 * b;
  });
}

}  // namespace kgl
