#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kgl/propagator.hpp"

using namespace kgl;

TEST_CASE("kernels at t = 0") {
  const LatticeParams p(1, 1, 1);
  CHECK(kernel(p, 0, 0.0, {0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  for (const Site x : {Site{1, 0}, Site{3, -2}, Site{0, 7}}) {
    CHECK(std::abs(kernel(p, 0, 0.0, x)) < 1e-14);
  }
  for (int m : {-1, 1}) {
    for (const Site x : {Site{0, 0}, Site{1, 0}, Site{2, 2}}) CHECK(std::abs(kernel(p, m, 0.0, x)) < 1e-14);
  }
  const PropagatorField f = kernel_field(p, 0, 0.0, Window::square(5));
  CHECK(f.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.values.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multipliers") {
  CHECK(kernel_multiplier(-1, 2.5, 0.0) == -2.5);
  CHECK(kernel_multiplier(-1, 2.5, 1e-9) == doctest::Approx(-2.5));
  CHECK(kernel_multiplier(0, 2.0, 0.3) == doctest::Approx(std::cos(0.6)));
  CHECK(kernel_multiplier(1, 2.0, 0.3) == doctest::Approx(-0.3 * std::sin(0.6)));
  const auto z = kernel_multiplier(1, 2.0, std::complex<double>(0.3, 0));
  CHECK(z.real() == doctest::Approx(-0.3 * std::sin(0.6)));
}

TEST_CASE("quadrature against the spectral oracle") {
  const LatticeParams p(1, 1, 1);
  for (double t : {10.0, 20.0}) {
    const LatticeState s = spectral_evolution(p, LatticeState::delta(256), t);
    const PropagatorField f = kernel_field(p, 0, t, Window::square(30));
    double diff = 0;
    for (int a = -30; a <= 30; ++a) {
      for (int b = -30; b <= 30; ++b) diff = std::max(diff, std::abs(s.u_at({a, b}) - f.at({a, b})));
    }
    CHECK(diff < 1e-8);
    CHECK(std::abs(kernel(p, 0, t, {0, 0}) - s.u_at({0, 0})) < 1e-8);
  }
}

TEST_CASE("field consistency and parity") {
  const LatticeParams p(0.7, 1.2, 0.6);
  const double t = 7.5;
  const auto fields = kernel_fields(p, t, Window::square(12));
  for (int m = -1; m <= 1; ++m) {
    const PropagatorField& f = fields[m + 1];
    CHECK(f.m == m);
    for (int a = -12; a <= 12; ++a) {
      for (int b = -12; b <= 12; ++b) {
        CHECK(std::abs(f.at({a, b}) - f.at({-a, -b})) < 1e-10);
        CHECK(std::abs(f.at({a, b}) - f.at({-a, b})) < 1e-10);
      }
    }
    for (const Site x : {Site{0, 0}, Site{3, -5}, Site{12, 12}}) {
      CHECK(std::abs(f.at(x) - kernel(p, m, t, x)) < 1e-9);
      // H0 even in t, H(+-1) odd.
      CHECK(std::abs(kernel(p, m, -t, x) - (m == 0 ? 1 : -1) * kernel(p, m, t, x)) < 1e-12);
    }
  }
}

TEST_CASE("time derivatives and the lattice equation") {
  const LatticeParams p(1, 1, 2);
  const double h = 1e-3;
  for (double t : {2.0, 9.0}) {
    for (const Site x : {Site{0, 0}, Site{2, 1}, Site{-3, 4}}) {
      const double d_neg = (kernel(p, -1, t + h, x) - kernel(p, -1, t - h, x)) / (2 * h);
      CHECK(std::abs(d_neg + kernel(p, 0, t, x)) < 1e-6);
      const double d0 = (kernel(p, 0, t + h, x) - kernel(p, 0, t - h, x)) / (2 * h);
      CHECK(std::abs(d0 - kernel(p, 1, t, x)) < 1e-6);
      const double tt = (kernel(p, 0, t + h, x) - 2 * kernel(p, 0, t, x) + kernel(p, 0, t - h, x)) / (h * h);
      auto H = [&](int a, int b) { return kernel(p, 0, t, {x.x1 + a, x.x2 + b}); };
      const double lap = p.lambda1() * (H(1, 0) + H(-1, 0) - 2 * H(0, 0)) +
                         p.lambda2() * (H(0, 1) + H(0, -1) - 2 * H(0, 0));
      CHECK(std::abs(tt + p.omega() * p.omega() * H(0, 0) - lap) < 1e-5);
    }
  }
}

TEST_CASE("ray scan matches pointwise kernels") {
  const LatticeParams p(1, 1, 1);
  const Vec2 v(0.3, 0.2);
  const auto scan = kernel_ray_scan(p, 0, v, 20.0, 0.5, 200, {}, {1, -1});
  REQUIRE(scan.size() == 200);
  for (std::size_t i = 0; i < scan.size(); i += 17) {
    const double t = 20.0 + 0.5 * static_cast<double>(i);
    CHECK(scan[i].t == doctest::Approx(t));
    CHECK(scan[i].x == Site{static_cast<int>(std::lround(v.x() * t)) + 1,
                            static_cast<int>(std::lround(v.y() * t)) - 1});
    CHECK(std::abs(scan[i].value - kernel(p, 0, t, scan[i].x)) < 1e-9);
  }
}

TEST_CASE("shifted contour reproduces small values") {
  const LatticeParams p(1, 1, 1);
  const double t = 10;
  for (const Site x : {Site{12, 0}, Site{14, 3}, Site{16, 16}}) {
    const Vec2 mu = choose_contour_shift(p, t, x);
    CHECK(mu.norm() > 0);
    const auto s = kernel_shifted(p, 0, t, x, mu);
    const double direct = kernel(p, 0, t, x);
    if (std::abs(direct) > 1e-8) CHECK(s.value() == doctest::Approx(direct).epsilon(1e-6));
    CHECK(std::abs(s.value() - direct) < 1e-12);
  }
  // Deep exterior: finite logarithm far below the double range.
  const auto deep = kernel_shifted(p, 0, 5.0, {400, 0}, choose_contour_shift(p, 5.0, {400, 0}));
  CHECK(std::isfinite(deep.log_abs()));
  CHECK(deep.log_abs() < -1000);
}

TEST_CASE("resolution cap") {
  QuadratureOptions small;
  small.max_grid = 64;
  CHECK_THROWS_AS(kernel(LatticeParams(1, 1, 1), 0, 500.0, {0, 0}, small), ResolutionError);
  CHECK(initial_grid(LatticeParams(1, 1, 1), 0.0, 0) == 64);
}

TEST_CASE("spectral and leapfrog evolution") {
  const LatticeParams p(1, 1, 1);
  LatticeState init = LatticeState::delta(64);
  init.p_at({2, -1}) = 0.5;
  const LatticeState same = spectral_evolution(p, init, 0.0);
  CHECK((same.u - init.u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((same.p - init.p).cwiseAbs().maxCoeff() < 1e-15);
  const LatticeState id = leapfrog_evolution(p, init, 0.0, 0.01);
  CHECK((id.u - init.u).cwiseAbs().maxCoeff() == 0.0);

  const double e0 = energy(p, init);
  CHECK(std::abs(energy(p, spectral_evolution(p, init, 37.0)) - e0) < 1e-12);
  CHECK(std::abs(energy(p, leapfrog_evolution(p, init, 20.0, 0.01)) - e0) / e0 < 1e-4);

  const LatticeState exact = spectral_evolution(p, init, 4.0);
  const double e1 = (leapfrog_evolution(p, init, 4.0, 0.02).u - exact.u).cwiseAbs().maxCoeff();
  const double e2 = (leapfrog_evolution(p, init, 4.0, 0.01).u - exact.u).cwiseAbs().maxCoeff();
  CHECK(e1 / e2 > 3.6);
  CHECK(e1 / e2 < 4.4);
  CHECK_THROWS_AS(leapfrog_evolution(p, init, 1.0, 0.7), StabilityError);
  CHECK_THROWS(spectral_evolution(p, LatticeState::delta(48), 1.0));
}

TEST_CASE("energy") {
  const LatticeParams p(1, 1, 1);
  CHECK(energy(p, LatticeState(64)) == 0.0);
  CHECK(energy(p, LatticeState::delta(64)) == doctest::Approx(2.5));
  CHECK(energy(LatticeParams(2, 1, 3), LatticeState::delta(64)) == doctest::Approx(0.5 * (4 + 2 + 6)));
}

TEST_CASE("field export") {
  const LatticeParams p(1, 1, 1);
  const PropagatorField f = kernel_field(p, 1, 3.0, Window{-2, 3, -1, 1});
  std::ostringstream csv;
  write_field_csv(csv, f);
  const std::string text = csv.str();
  CHECK(text.rfind("x1,x2,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 6 * 3);
  CHECK(text.find('\r') == std::string::npos);

  std::stringstream bin;
  write_field_binary(bin, f);
  const std::string bytes = bin.str();
  CHECK(bytes.size() == 32 + 8 * 18);
  CHECK(bytes.substr(0, 4) == "KGF1");
  const PropagatorField back = read_field_binary(bin, p);
  CHECK(back.m == 1);
  CHECK(back.t == 3.0);
  CHECK(back.window.x1_min == -2);
  CHECK(back.window.x2_max == 1);
  CHECK(back.grid_n == f.grid_n);
  CHECK(back.values == f.values);
}
