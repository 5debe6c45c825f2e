#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kgl/decay.hpp"

using namespace kgl;

namespace {

DecaySeries synthetic(double power, double wiggle) {
  DecaySeries s;
  for (double t = 50; t <= 800; t += 0.5) {
    s.samples.push_back({t, {0, 0}, std::pow(t, power) * (1 + wiggle * std::cos(1.7 * t))});
  }
  return s;
}

}  // namespace

TEST_CASE("fit_line recovers a line") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(2.0 - 0.5 * i + (i % 2 ? 1e-3 : -1e-3));
  }
  const FitReport f = fit_line(x, y, FitMethod::LinearInT);
  CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(f.ci_halfwidth > 0);
  CHECK(f.ci_halfwidth < 1e-3);
  CHECK_THROWS_AS(fit_line({1, 2}, {1, 2}, FitMethod::LinearInT), InsufficientDataError);
}

TEST_CASE("fit_power on synthetic envelopes") {
  for (double power : {-0.5, -0.75, -1.0}) {
    const FitReport exact = fit_power(synthetic(power, 0.0));
    CHECK(std::abs(exact.exponent - power) < 0.01);
    const FitReport oscillating = fit_power(synthetic(power, 0.5));
    CHECK(std::abs(oscillating.exponent - power) < 0.02);
    CHECK(oscillating.t_min >= 50);
    CHECK(oscillating.t_max <= 800);
  }
  DecaySeries short_series;
  for (double t = 50; t < 300; t += 1) short_series.samples.push_back({t, {0, 0}, 1 / t});
  CHECK_THROWS_AS(fit_power(short_series), InsufficientDataError);
}

TEST_CASE("decay scans") {
  const LatticeParams p(1, 1, 1);
  const DecaySeries origin = decay_scan(p, 0, Vec2::Zero(), std::vector<double>{10, 20, 40});
  REQUIRE(origin.samples.size() == 3);
  for (const auto& s : origin.samples) {
    CHECK(s.x == Site{0, 0});
    CHECK(s.value == doctest::Approx(kernel(p, 0, s.t, {0, 0})).epsilon(1e-12));
  }
  // Uniform grid through batched scans agrees with pointwise evaluation.
  const DecaySeries batched = decay_scan(p, 0, v3_points(p)[0], TimeGrid{30, 60, 0.5});
  CHECK(batched.samples.size() == 61);
  for (std::size_t i = 0; i < batched.samples.size(); i += 10) {
    const auto& s = batched.samples[i];
    CHECK(std::abs(s.value - kernel(p, 0, s.t, s.x)) < 1e-9);
  }
  // Outside the light cone the kernel is negligible by moderate t.
  const double vmax = max_group_speed(p);
  const DecaySeries outside = decay_scan(p, 0, 1.3 * vmax * Vec2(1, 0), std::vector<double>{150, 200});
  for (const auto& s : outside.samples) CHECK(std::abs(s.value) < 1e-12);
  CHECK(TimeGrid::defaults(LatticeParams(0, 1, 1)).t_max == 1600);
}

TEST_CASE("exponent ordering cusp > caustic > interior") {
  // Six dyadic windows. The cusp and arc intervals still overlap slightly at
  // this range, so that pair is reported rather than asserted.
  const LatticeParams p(1, 1, 1);
  const TimeGrid grid{25, 1600, 0.1};
  const FitReport cusp = fit_power(decay_scan(p, 0, v3_points(p)[0], grid));
  const FitReport arc = fit_power(decay_scan(p, 0, psi2_axis_point(p), grid));
  const FitReport interior = fit_power(decay_scan(p, 0, Vec2::Zero(), grid));
  MESSAGE("cusp " << cusp.exponent << " +- " << cusp.ci_halfwidth << ", arc " << arc.exponent << " +- "
                  << arc.ci_halfwidth << ", interior " << interior.exponent << " +- " << interior.ci_halfwidth);
  CHECK(cusp.exponent > arc.exponent);
  CHECK(arc.exponent > interior.exponent);
  WARN(cusp.exponent - cusp.ci_halfwidth > arc.exponent + arc.ci_halfwidth);
  CHECK(arc.exponent - arc.ci_halfwidth > interior.exponent + interior.ci_halfwidth);
  CHECK(cusp.exponent - cusp.ci_halfwidth > interior.exponent + interior.ci_halfwidth);
}

TEST_CASE("exponential decay outside the light cone") {
  const LatticeParams p(1, 1, 1);
  const double t = 40, vmax = max_group_speed(p);
  const double r0 = std::ceil(1.2 * vmax * t);
  const ExponentialFit near = fit_exponential(p, 0, t, Vec2(1, 0), r0, r0 + 30);
  const ExponentialFit far = fit_exponential(p, 0, t, Vec2(1, 0), r0, r0 + 60);
  CHECK(near.fit.exponent < 0);
  CHECK(near.mu_bound > 0.3);
  CHECK(far.mu_slope >= 0.8 * near.mu_slope);
  const double v1 = lieb_robinson_velocity(p, 1.0);
  CHECK(v1 == doctest::Approx(1 + 2 * std::sqrt(2.0) * std::sinh(0.5)));
  for (const auto& s : far.samples) CHECK(s.log_abs <= -(std::hypot(s.x.x1, s.x.x2) - v1 * t));
  CHECK_THROWS_AS(fit_exponential(p, 0, t, Vec2(1, 0), 5, 20), RegionError);
}

TEST_CASE("report export") {
  RegionFit r;
  r.region = "cusp";
  r.fit.exponent = -0.75;
  r.fit.ci_halfwidth = 0.01;
  r.fit.t_min = 50;
  r.fit.t_max = 800;
  std::ostringstream os;
  write_fit_csv(os, {r});
  CHECK(os.str() == "region,exponent,ci,t_min,t_max\ncusp,-0.75,0.01,50,800\n");
  std::ostringstream text;
  write_fit_text(text, {r});
  CHECK(text.str().find("cusp") != std::string::npos);
}
