#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kgl/harmonic.hpp"

using namespace kgl;

namespace {

ComplexLatticeFunction random_patch(std::mt19937_64& rng, int r = 2, const Site& at = {}) {
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexLatticeFunction f;
  for (int a = -r; a <= r; ++a) {
    for (int b = -r; b <= r; ++b) f.set({at.x1 + a, at.x2 + b}, {u(rng), u(rng)});
  }
  return f;
}

double sup_diff(const ComplexLatticeFunction& a, const ComplexLatticeFunction& b) {
  double d = 0;
  for (const auto& [x, v] : a.values()) d = std::max(d, std::abs(v - b.at(x)));
  for (const auto& [x, v] : b.values()) d = std::max(d, std::abs(v - a.at(x)));
  return d;
}

const Complex I(0, 1);

}  // namespace

TEST_CASE("lattice functions") {
  ComplexLatticeFunction f = ComplexLatticeFunction::delta({1, 2}, {3, 4});
  CHECK(f.size() == 1);
  CHECK(f.l2_norm() == doctest::Approx(5));
  f.add({1, 2}, {-3, -4});
  CHECK(f.empty());
  f.set({0, 0}, 0.0);
  CHECK(f.empty());
  const auto g = ComplexLatticeFunction::delta({3, 4}).translated({1, -1});
  CHECK(g.at({4, 3}) == Complex(1));
  CHECK(g.support_radius() == doctest::Approx(5));
}

TEST_CASE("symplectic form") {
  std::mt19937_64 rng(3);
  const auto f = random_patch(rng), g = random_patch(rng, 1, {1, 0});
  CHECK(std::abs(symplectic_form(f, f)) < 1e-15);
  CHECK(symplectic_form(f, g) == doctest::Approx(-symplectic_form(g, f)));
  CHECK(symplectic_form(ComplexLatticeFunction::delta({0, 0}), ComplexLatticeFunction::delta({0, 0}, I)) == 1.0);
}

TEST_CASE("T_t basics") {
  const LatticeParams p(1, 1, 1);
  std::mt19937_64 rng(5);
  const auto f = random_patch(rng), g = random_patch(rng);
  CHECK(sup_diff(apply_Tt(p, f, 0.0), f) == 0.0);

  const double t = 6.0;
  const auto tf = apply_Tt(p, f, t), tg = apply_Tt(p, g, t);
  CHECK(sup_diff(apply_Tt(p, f + g, t), tf + tg) < 1e-10);
  CHECK(sup_diff(apply_Tt(p, f * 2.5, t), tf * 2.5) < 1e-10);
  // Real-linear but not complex-linear.
  CHECK(sup_diff(apply_Tt(p, f * I, t), tf * I) > 1e-3);

  CHECK(std::abs(symplectic_form(tf, tg) - symplectic_form(f, g)) < 1e-8);
  CHECK(sup_diff(apply_Tt(p, tf, t), apply_Tt(p, f, 2 * t)) < 1e-6);
  CHECK(sup_diff(apply_Tt(p, apply_Tt(p, f, 4.0), 2.5), apply_Tt(p, f, 6.5)) < 1e-6);
  CHECK_THROWS_AS(apply_Tt(p, f, 20.0, 5.0), TruncationError);
}

TEST_CASE("symplectic invariance at t = 25") {
  const LatticeParams p(1, 1, 2);
  std::mt19937_64 rng(8);
  const auto f = random_patch(rng), g = random_patch(rng, 2, {3, -1});
  const double before = symplectic_form(f, g);
  const double after = symplectic_form(apply_Tt(p, f, 25.0), apply_Tt(p, g, 25.0));
  CHECK(std::abs(after - before) < 1e-8);
}

TEST_CASE("Weyl commutator norm") {
  const LatticeParams p(1, 1, 1);
  std::mt19937_64 rng(13);
  const auto f = random_patch(rng, 1), far = random_patch(rng, 1, {10, 0});
  CHECK(commutator_norm(p, f, far, 0.0).norm == 0.0);
  CHECK(commutator_norm(p, f, f, 0.0).norm == doctest::Approx(0).epsilon(1e-15));
  for (double t : {0.5, 3.0, 12.0}) {
    const auto g = random_patch(rng, 1, {2, 1});
    const auto c = commutator_norm(p, f, g, t);
    CHECK(c.norm <= std::min(2.0, std::abs(c.symplectic_phase)));
    CHECK(c.norm <= pairwise_kernel_bound(p, f, g, t) + 1e-12);
    CHECK(c.symplectic_phase == doctest::Approx(symplectic_form(apply_Tt(p, f, t), g)).epsilon(1e-8));
  }
  for (double theta = -20; theta <= 20; theta += 0.37) {
    const double n = weyl_norm_from_phase(theta);
    CHECK(n <= std::min(2.0, std::abs(theta)));
    CHECK(n == doctest::Approx(std::abs(1.0 - std::exp(I * theta))).epsilon(1e-12));
  }
}

TEST_CASE("Lieb-Robinson checks") {
  const LatticeParams p(1, 1, 1);
  const auto f = ComplexLatticeFunction::delta({0, 0});
  const auto g = ComplexLatticeFunction::delta({0, 0}, Complex(1, 1) / std::sqrt(2.0));

  SUBCASE("separated supports decay exponentially") {
    const double vmax = max_group_speed(p);
    const LRReport rep = lr_verify(p, f, g, TimeGrid{10, 160, 1.0}, 0.05, 1.3 * vmax * Vec2(1, 0));
    CHECK(rep.worst_region == Region::Exterior);
    CHECK(rep.mu > 0);
    CHECK(rep.pass);
    for (const auto& row : rep.rows) CHECK(row.commutator_norm <= row.bound_value * (1 + 1e-12));
  }
  SUBCASE("tracking the caustic arc") {
    const LRReport rep = lr_verify(p, f, g, TimeGrid{25, 400, 0.1}, 0.05, psi2_axis_point(p));
    MESSAGE("arc exponent " << rep.fit.exponent);
    CHECK(rep.worst_region == Region::NearV2);
    CHECK(rep.fit.exponent <= -0.78);
  }
  SUBCASE("csv") {
    const LRReport rep = lr_verify(p, f, g, TimeGrid{10, 160, 1.0}, 0.05);
    std::ostringstream os;
    write_lr_csv(os, rep);
    const std::string s = os.str();
    CHECK(s.rfind("t,commutator_norm,bound_value,region_tag\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == rep.rows.size() + 1);
  }
}
