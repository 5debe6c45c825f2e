#include "kgl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "kgl/decay.hpp"
#include "kgl/harmonic.hpp"
#include "kgl/phase.hpp"
#include "kgl/propagator.hpp"
#include "kgl/singular.hpp"
#include "kgl/velocity.hpp"

namespace kgl {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

bool newton_distances(std::string& detail) {
  bool ok = true;
  for (const LatticeParams& p : {LatticeParams(1, 1, 1), LatticeParams(1, 1, 2)}) {
    const Rational origin = newton_distance(taylor_table(p, Vec2::Zero(), 4), kTaylorCutoff);
    // A fold point: where the origin loop meets k1 = 0.
    const Vec2 fold(0.0, std::acos(*solve_BF(p, 1.0)));
    const bool fold_is_k2 = classify_k(p, fold).kind == DegeneracyKind::K2;
    const Rational k2 = newton_distance(taylor_table(p, fold, 4), kTaylorCutoff);
    bool cusps = true;
    for (const TorusPoint& k : kstar_points(p)) {
      cusps = cusps && newton_distance(taylor_table(p, k.vec(), 4), kTaylorCutoff) == Rational(4, 3);
    }
    ok = ok && origin == Rational(1) && fold_is_k2 && k2 == Rational(6, 5) && cusps;
    detail += "(" + num(p.omega()) + "," + num(p.lambda1()) + "," + num(p.lambda2()) +
              "): origin " + origin.str() + ", fold " + k2.str() + ", cusps " +
              (cusps ? "4/3" : "mismatch") + "; ";
  }
  return ok;
}

bool degenerate_points(std::string& detail) {
  bool ok = true;
  for (const LatticeParams& p : {LatticeParams(1, 1, 1), LatticeParams(0.5, 2, 2)}) {
    const ABPoint ab = find_astar(p);
    double err = std::max(std::abs(ab.a), std::abs(ab.b));
    for (const TorusPoint& k : kstar_points(p)) {
      err = std::max(err, std::abs(std::abs(k.k1) - kPi / 2));
      err = std::max(err, std::abs(std::abs(k.k2) - kPi / 2));
    }
    ok = ok && err <= 1e-10;
    detail += "equal lambdas err " + num(err, 3) + "; ";
  }
  const LatticeParams p(1, 1, 2);
  const ABPoint ab = find_astar(p);
  const double rf = std::abs(F_value(p, ab)), rg = std::abs(G_value(p, ab));
  ok = ok && ab.a < 0 && 0 < ab.b && rf < 1e-12 && rg < 1e-12;
  detail += "(1,1,2): a* " + num(ab.a, 8) + ", b* " + num(ab.b, 8) + ", |F| " + num(rf, 2) +
            ", |G| " + num(rg, 2);
  return ok;
}

bool wave_cusps(std::string& detail) {
  const auto v3 = v3_points(LatticeParams(0, 1, 1));
  double err = 0;
  for (const auto& v : v3) {
    err = std::max({err, std::abs(std::abs(v.x()) - 0.5), std::abs(std::abs(v.y()) - 0.5)});
  }
  const double diameter = (v3[0] - v3[2]).norm();
  const double l1 = 1, l2 = 4;
  const ABPoint c = astar_wave_closed_form(l1, l2);
  const Vec2 closed(std::sqrt(1 + 3 * c.a) / 2 * std::sqrt(l1), std::sqrt(1 + 3 * c.b) / 2 * std::sqrt(l2));
  const Vec2 numeric = v3_points(LatticeParams(0, l1, l2))[0];
  const double err14 = (numeric.cwiseAbs() - closed).cwiseAbs().maxCoeff();
  detail = "unit cusps err " + num(err, 3) + ", diameter - sqrt2 " +
           num(diameter - std::sqrt(2.0), 3) + ", (1,4) closed-form err " + num(err14, 3);
  return err <= 1e-10 && std::abs(diameter - std::sqrt(2.0)) <= 1e-9 && err14 <= 1e-8;
}

bool decay_exponents(std::string& detail) {
  const LatticeParams p(1, 1, 1);
  const TimeGrid grid{50, 800, 0.1};
  struct Ray {
    const char* name;
    Vec2 v;
    double lo, hi;
  };
  const std::vector<Ray> rays = {{"cusp", v3_points(p)[0], -0.80, -0.70},
                                 {"psi2", psi2_axis_point(p), -0.90, -0.78},
                                 {"interior", Vec2::Zero(), -1.07, -0.93}};
  bool ok = true;
  for (const Ray& r : rays) {
    const FitReport f = fit_power(decay_scan(p, 0, r.v, grid));
    const bool in = f.exponent >= r.lo && f.exponent <= r.hi;
    ok = ok && in;
    detail += std::string(r.name) + " " + num(f.exponent) + " +- " + num(f.ci_halfwidth, 2) +
              (in ? "" : " (out of range)") + "; ";
  }
  const GlobalMaxReport g = global_max_report(p, 50, 800, 16);
  const bool stable = g.relative_spread() <= 0.25;
  ok = ok && stable;
  detail += "global max slope " + num(g.fit.exponent) + ", C " + num(g.c_lower) + " vs " +
            num(g.c_upper);
  return ok;
}

bool exponential_exterior(std::string& detail) {
  const LatticeParams p(1, 1, 1);
  const double t = 40;
  const double vmax = max_group_speed(p);
  const ExponentialFit e = fit_exponential(p, 0, t, Vec2(1, 0), std::ceil(1.2 * vmax * t), 120);
  const double v1 = lieb_robinson_velocity(p, 1.0);
  bool envelope = true;
  for (const auto& s : e.samples) {
    envelope = envelope && s.log_abs <= -(std::hypot(s.x.x1, s.x.x2) - v1 * t);
  }
  detail = "mu " + num(e.mu_bound) + " (slope " + num(e.mu_slope) + "), " +
           std::to_string(e.samples.size()) + " samples, uniform envelope " +
           (envelope ? "holds" : "violated");
  return e.mu_bound > 0.3 && envelope;
}

double max_diff(const LatticeState& a, const LatticeState& b) {
  return (a.u - b.u).cwiseAbs().maxCoeff();
}

bool oracle_equivalence(std::string& detail) {
  const LatticeParams p(1, 1, 1);
  double quad = 0;
  for (double t : {5.0, 10.0, 20.0}) {
    const LatticeState s = spectral_evolution(p, LatticeState::delta(256), t);
    const PropagatorField f = kernel_field(p, 0, t, Window::square(30));
    for (int a = -30; a <= 30; ++a) {
      for (int b = -30; b <= 30; ++b) quad = std::max(quad, std::abs(s.u_at({a, b}) - f.at({a, b})));
    }
  }
  const LatticeState init = LatticeState::delta(64);
  const LatticeState exact = spectral_evolution(p, init, 10.0);
  const double e1 = max_diff(leapfrog_evolution(p, init, 10.0, 0.01), exact);
  const double e2 = max_diff(leapfrog_evolution(p, init, 10.0, 0.005), exact);
  const double ratio = e1 / e2;
  detail = "quadrature vs spectral " + num(quad, 3) + ", leapfrog err " + num(e2, 3) +
           ", halving ratio " + num(ratio);
  return quad <= 1e-8 && e2 <= 1e-4 && ratio >= 3.6 && ratio <= 4.4;
}

bool conservation(std::string& detail) {
  const LatticeParams p(1, 1, 1);
  LatticeState init = LatticeState::delta(64);
  init.p_at({1, 0}) = 1.0;
  const double e0 = energy(p, init);
  const double es = energy(p, spectral_evolution(p, init, 100.0));
  const double el = energy(p, leapfrog_evolution(p, init, 100.0, 0.01));
  const double spectral_drift = std::abs(es - e0);
  const double leap_drift = std::abs(el - e0) / e0;

  const double h = 1e-3;
  double d1 = 0, d2 = 0, kg = 0;
  for (double t : {3.0, 10.0}) {
    for (int a = 0; a <= 4; ++a) {
      for (int b = 0; b <= 3; ++b) {
        const Site x{a, b};
        auto H = [&](int m, double s, const Site& y) { return kernel(p, m, s, y); };
        d1 = std::max(d1, std::abs((H(-1, t + h, x) - H(-1, t - h, x)) / (2 * h) + H(0, t, x)));
        d2 = std::max(d2, std::abs((H(0, t + h, x) - H(0, t - h, x)) / (2 * h) - H(1, t, x)));
        const double tt = (H(0, t + h, x) - 2 * H(0, t, x) + H(0, t - h, x)) / (h * h);
        const double lap = p.lambda1() * (H(0, t, {a + 1, b}) + H(0, t, {a - 1, b}) - 2 * H(0, t, x)) +
                           p.lambda2() * (H(0, t, {a, b + 1}) + H(0, t, {a, b - 1}) - 2 * H(0, t, x));
        kg = std::max(kg, std::abs(tt + p.omega() * p.omega() * H(0, t, x) - lap));
      }
    }
  }
  detail = "spectral dE " + num(spectral_drift, 3) + ", leapfrog dE/E " + num(leap_drift, 3) +
           ", dH-1/dt+H0 " + num(d1, 3) + ", dH0/dt-H1 " + num(d2, 3) + ", KG residual " + num(kg, 3);
  return spectral_drift <= 1e-12 && leap_drift < 1e-4 && d1 <= 1e-5 && d2 <= 1e-5 && kg <= 1e-5;
}

ComplexLatticeFunction random_patch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexLatticeFunction f;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) f.set({a, b}, {u(rng), u(rng)});
  }
  return f;
}

double sup_diff(const ComplexLatticeFunction& a, const ComplexLatticeFunction& b) {
  double d = 0;
  for (const auto& [x, v] : a.values()) d = std::max(d, std::abs(v - b.at(x)));
  for (const auto& [x, v] : b.values()) d = std::max(d, std::abs(v - a.at(x)));
  return d;
}

bool quantum_layer(std::string& detail) {
  const LatticeParams p(1, 1, 1);
  std::mt19937_64 rng(20240611);
  const ComplexLatticeFunction f = random_patch(rng), g = random_patch(rng);
  const double identity = sup_diff(apply_Tt(p, f, 0.0), f);
  double sym = 0, group = 0;
  bool cap = true;
  for (double t : {5.0, 25.0}) {
    const auto tf = apply_Tt(p, f, t), tg = apply_Tt(p, g, t);
    sym = std::max(sym, std::abs(symplectic_form(tf, tg) - symplectic_form(f, g)));
    group = std::max(group, sup_diff(apply_Tt(p, tf, t), apply_Tt(p, f, 2 * t)));
    const auto c = commutator_norm(p, f, g, t);
    cap = cap && c.norm <= std::min(2.0, std::abs(c.symplectic_phase));
  }
  for (double theta : {1e-9, 0.3, 1.0, 3.0, kPi, 4.0, 10.0, -2.5}) {
    cap = cap && weyl_norm_from_phase(theta) <= std::min(2.0, std::abs(theta));
  }
  const auto rep = lr_verify(p, ComplexLatticeFunction::delta({0, 0}),
                             ComplexLatticeFunction::delta({0, 0}, Complex(1, 1) / std::sqrt(2.0)),
                             TimeGrid{50, 800, 0.1}, 0.05);
  detail = "T0 err " + num(identity, 3) + ", symplectic err " + num(sym, 3) + ", group err " +
           num(group, 3) + ", cap " + (cap ? "holds" : "violated") + ", envelope slope " +
           num(rep.fit.exponent);
  return identity <= 1e-12 && sym <= 1e-8 && group <= 1e-6 && cap && rep.fit.exponent <= -0.70;
}

bool wave_rate(std::string& detail) {
  const LatticeParams p(0, 1, 1);
  // Light-cone ray: |grad gamma| -> sqrt(lambda1) = 1 along k2 = 0.
  const FitReport f = fit_power(decay_scan(p, -1, Vec2(1, 0), TimeGrid{100, 1600, 1.0}));
  detail = "light-cone exponent " + num(f.exponent) + " +- " + num(f.ci_halfwidth, 2);
  return f.exponent >= -0.73 && f.exponent <= -0.60;
}

bool stability_sweep(std::string& detail) {
  std::mt19937_64 rng(1729);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  double min_disc = std::numeric_limits<double>::infinity();
  int bad = 0;
  for (int i = 0; i < 10; ++i) {
    const LatticeParams p(u(rng), u(rng), u(rng));
    min_disc = std::min(min_disc, std::abs(k3_discriminant(p).normalized));
    const auto psi = psi_curves(p, 512);
    if (cusp_vertices(psi[1]).size() != 4) ++bad;
  }
  detail = "min |discriminant| " + num(min_disc, 3) + ", wrong cusp counts " + std::to_string(bad);
  return min_disc > 1e-6 && bad == 0;
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {1, "Newton distances 1, 6/5, 4/3", 10, newton_distances},
      {2, "Degenerate-point geometry", 1, degenerate_points},
      {3, "Wave-mode cusp closed form", 10, wave_cusps},
      {4, "Decay exponents and global envelope", 600, decay_exponents},
      {5, "Exponential exterior decay", 120, exponential_exterior},
      {6, "Quadrature / spectral / leapfrog agreement", 180, oracle_equivalence},
      {7, "Conservation and kernel ODE identities", 120, conservation},
      {8, "Quantum layer", 300, quantum_layer},
      {9, "Wave-mode light-cone rate", 600, wave_rate},
      {10, "Stability sweep", 120, stability_sweep},
  };
  return all;
}

void list_acceptance(std::ostream& os) {
  for (const auto& c : acceptance_criteria()) {
    os << c.id << ". " << c.title << " (budget " << c.budget_seconds << " s)\n";
  }
}

std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& ids) {
  std::vector<CriterionResult> results;
  for (const auto& c : acceptance_criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    CriterionResult r;
    r.id = c.id;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.passed = c.run(r.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > c.budget_seconds) {
      r.passed = false;
      r.detail += " [over budget]";
    }
    os << (r.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " -- "
       << r.detail << " (" << num(r.seconds, 3) << " s)" << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace kgl
