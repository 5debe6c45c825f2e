#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgl/phase.hpp"

using namespace kgl;

namespace {

constexpr double pi = std::numbers::pi;

// Independent scalar evaluation in the textbook form.
double gamma_plain(double w, double l1, double l2, double k1, double k2) {
  return std::sqrt(w * w + 2 * l1 * (1 - std::cos(k1)) + 2 * l2 * (1 - std::cos(k2)));
}

Vec2 fd_grad(const LatticeParams& p, const Vec2& k, double h = 1e-5) {
  const Vec2 e1(h, 0), e2(0, h);
  return {(gamma(p, Vec2(k + e1)) - gamma(p, Vec2(k - e1))) / (2 * h),
          (gamma(p, Vec2(k + e2)) - gamma(p, Vec2(k - e2))) / (2 * h)};
}

}  // namespace

TEST_CASE("gamma at reference points") {
  const LatticeParams p(1, 1, 1);
  CHECK(gamma(p, Vec2(0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma(p, Vec2(pi, pi)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(gamma(p, Vec2(pi / 2, pi / 2)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(std::abs(gamma(p, Vec2(pi / 2, pi / 2)) - gamma_plain(1, 1, 1, pi / 2, pi / 2)) < 1e-14);
  CHECK(p.gamma_max() == doctest::Approx(3.0));
}

TEST_CASE("group velocity") {
  for (const LatticeParams& p : {LatticeParams(1, 1, 1), LatticeParams(0.3, 2, 0.7)}) {
    CHECK(grad_gamma(p, Vec2(0, 0)).norm() == 0.0);
    CHECK(grad_gamma(p, Vec2(pi, pi)).norm() < 1e-15);
  }
  const LatticeParams p(1, 1, 1);
  const Vec2 v = grad_gamma(p, Vec2(pi / 2, 0));
  CHECK(std::abs(v.x() - 1 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(v.y()) < 1e-15);
  CHECK((v - fd_grad(p, Vec2(pi / 2, 0))).norm() < 1e-8);
  CHECK_THROWS_AS(grad_gamma(LatticeParams(0, 1, 1), Vec2(0, 0)), SingularOriginError);
}

TEST_CASE("hessian examples") {
  const SymMatrix2 h = hessian_gamma(LatticeParams(1, 2, 3), Vec2(0, 0));
  CHECK(h.m11 == doctest::Approx(2.0));
  CHECK(h.m12 == 0.0);
  CHECK(h.m22 == doctest::Approx(3.0));
  for (const LatticeParams& p : {LatticeParams(1, 1, 1), LatticeParams(0.5, 1, 3)}) {
    CHECK(std::abs(hessian_det(p, Vec2(pi / 2, pi / 2))) < 1e-15);
    const SymMatrix2 c = hessian_gamma(p, Vec2(pi / 2, -pi / 2));
    CHECK(std::abs(c.m11 * c.m22 - c.m12 * c.m12) < 1e-15);
  }
}

TEST_CASE("F and G closed forms") {
  const LatticeParams p(1.3, 0.7, 2.1);
  CHECK(F_value(p, {0, 0}) == 0.0);
  CHECK(F_value(p, {1, 1}) == doctest::Approx(1.69));
  CHECK(F_value(p, {0, 0.4}) == doctest::Approx(-0.7 * 0.4));
  CHECK(G_value(p, {0, 0.4}) == doctest::Approx(0.7 * 0.064));
  CHECK(G_value(p, {-0.3, 0}) == doctest::Approx(2.1 * -0.027));
  const LatticeParams q(1.3, 1.5, 1.5);
  for (double a : {-0.9, -0.2, 0.35, 0.8}) {
    CHECK(G_value(q, {a, -a}) == doctest::Approx(-(1.69 + 6.0) * std::pow(a, 6)));
  }
  // Derivatives against central differences.
  const double h = 1e-6;
  for (const ABPoint ab : {ABPoint{0.2, -0.4}, ABPoint{-0.7, 0.5}}) {
    CHECK(F_da(p, ab) == doctest::Approx((F_value(p, {ab.a + h, ab.b}) - F_value(p, {ab.a - h, ab.b})) / (2 * h)).epsilon(1e-7));
    CHECK(F_db(p, ab) == doctest::Approx((F_value(p, {ab.a, ab.b + h}) - F_value(p, {ab.a, ab.b - h})) / (2 * h)).epsilon(1e-7));
    CHECK(G_da(p, ab) == doctest::Approx((G_value(p, {ab.a + h, ab.b}) - G_value(p, {ab.a - h, ab.b})) / (2 * h)).epsilon(1e-6));
    CHECK(G_db(p, ab) == doctest::Approx((G_value(p, {ab.a, ab.b + h}) - G_value(p, {ab.a, ab.b - h})) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("complex gamma") {
  const LatticeParams p(1, 1, 2);
  const Vec2 k(0.4, -1.1);
  const auto z = gamma_complex(p, k, Vec2::Zero());
  CHECK(z.imag() == 0.0);
  CHECK(z.real() == doctest::Approx(gamma(p, k)).epsilon(1e-15));
  for (double mu0 : {0.25, 1.0, 2.0}) {
    for (double ang : {0.0, 0.6, pi / 4, 1.3}) {
      const Vec2 mu = mu0 * Vec2(std::cos(ang), std::sin(ang));
      const auto b = complex_gamma_extrema(p, mu, 96);
      const double s = 2 * std::sqrt(p.lambda1() + p.lambda2());
      CHECK(b.max_imag <= s * std::sinh(mu0 / 2) + 1e-12);
      CHECK(b.max_abs <= p.omega() + s * std::cosh(mu0 / 2) + 1e-12);
    }
  }
}

TEST_CASE("properties on random samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> K(-pi, pi), P(0.2, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    const LatticeParams p(P(rng), P(rng), P(rng));
    double max_entry = 0;
    for (int i = 0; i < 100; ++i) {
      const Vec2 k(K(rng), K(rng));
      const double g = gamma(p, k);
      CHECK(gamma(p, Vec2(-k)) == g);
      CHECK(gamma(p, Vec2(-k.x(), k.y())) == g);
      CHECK(gamma(p, Vec2(k.x(), -k.y())) == g);
      CHECK(g >= p.omega() - 1e-15);
      CHECK(g <= p.gamma_max() + 1e-15);

      CHECK((grad_gamma(p, k) - fd_grad(p, k)).cwiseAbs().maxCoeff() < 1e-6);
      const double h = 1e-4;
      const Vec2 e1(h, 0), e2(0, h);
      const Vec2 d1 = (grad_gamma(p, Vec2(k + e1)) - grad_gamma(p, Vec2(k - e1))) / (2 * h);
      const Vec2 d2 = (grad_gamma(p, Vec2(k + e2)) - grad_gamma(p, Vec2(k - e2))) / (2 * h);
      const SymMatrix2 hs = hessian_gamma(p, k);
      CHECK(std::abs(hs.m11 - d1.x()) < 1e-5);
      CHECK(std::abs(hs.m12 - d1.y()) < 1e-5);
      CHECK(std::abs(hs.m12 - d2.x()) < 1e-5);
      CHECK(std::abs(hs.m22 - d2.y()) < 1e-5);

      const double det = hs.m11 * hs.m22 - hs.m12 * hs.m12;
      const double f = F_of_k(p, k);
      if (std::abs(f) > 1e-8) CHECK(std::signbit(det) == std::signbit(f));
    }
    for (int i = 0; i <= 64; ++i) {
      for (int j = 0; j <= 64; ++j) {
        const SymMatrix2 hs = hessian_gamma(p, Vec2(-pi + 2 * pi * i / 64, -pi + 2 * pi * j / 64));
        max_entry = std::max({std::abs(hs.m11), std::abs(hs.m12), std::abs(hs.m22)});
        REQUIRE(max_entry > 0);
      }
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(LatticeParams(1, 0, 1), ConfigError);
  CHECK_THROWS_AS(LatticeParams(1, 1, -2), ConfigError);
  CHECK_THROWS_AS(LatticeParams(-1, 1, 1), ConfigError);
  CHECK_THROWS_AS(LatticeParams(std::nan(""), 1, 1), ConfigError);
  CHECK(LatticeParams(0, 1, 1).wave_mode());
}
