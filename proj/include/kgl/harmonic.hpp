#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kgl/decay.hpp"
#include "kgl/propagator.hpp"
#include "kgl/velocity.hpp"

namespace kgl {

using Complex = std::complex<double>;

/// Finitely supported f : Z^2 -> C. Exact zeros are never stored.
class ComplexLatticeFunction {
 public:
  ComplexLatticeFunction() = default;

  static ComplexLatticeFunction delta(const Site& at, Complex value = 1.0);

  void set(const Site& x, Complex value);
  void add(const Site& x, Complex value);
  Complex at(const Site& x) const;

  const std::map<Site, Complex>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double l1_norm() const;
  double l2_norm() const;
  /// max |x|_2 over the support (0 when empty).
  double support_radius() const;

  ComplexLatticeFunction conj() const;
  ComplexLatticeFunction translated(const Site& by) const;
  ComplexLatticeFunction operator+(const ComplexLatticeFunction& o) const;
  ComplexLatticeFunction operator*(Complex c) const;

 private:
  std::map<Site, Complex> values_;
};

/// sigma(f, g) = Im <f, g>, with <f, g> = sum conj(f(x)) g(x). So
/// sigma(delta_0, i delta_0) = 1 and sigma(f, g) = -sigma(g, f).
double symplectic_form(const ComplexLatticeFunction& f, const ComplexLatticeFunction& g);

/// Default truncation radius v_max |t| + 40.
double default_truncation_radius(const LatticeParams& p, double t);

/// T_t f = f * (H0 - i/2 (H-1 + H1)) + conj(f) * (i/2 (H1 - H-1)).
/// Kernels are taken on the disc |z| <= radius (radius <= 0 selects the
/// default), dropping entries below 1e-12. Throws TruncationError when
/// a kernel exceeds 1e-10 on the outermost unit shell of the disc.
ComplexLatticeFunction apply_Tt(const LatticeParams& p, const ComplexLatticeFunction& f, double t,
                                double radius = 0.0, const QuadratureOptions& opts = {});

struct WeylCommutatorResult {
  double symplectic_phase = 0.0;  // Im <T_t f, g>
  double norm = 0.0;              // |1 - exp(i phase)|, in [0, 2]
};

/// Norm of [tau_t(W(f)), W(g)] from the symplectic phase. Kernel values are
/// evaluated pointwise at every difference x - y, on a shifted contour
/// when x - y lies well outside the light cone.
WeylCommutatorResult commutator_norm(const LatticeParams& p, const ComplexLatticeFunction& f,
                                     const ComplexLatticeFunction& g, double t,
                                     const QuadratureOptions& opts = {});

/// |1 - e^{i theta}| = 2 |sin(theta / 2)|.
double weyl_norm_from_phase(double theta);

/// Sum over pairs |f(y)| |g(x)| sum_m |H^(m)_t(x - y)|.
double pairwise_kernel_bound(const LatticeParams& p, const ComplexLatticeFunction& f,
                             const ComplexLatticeFunction& g, double t,
                             const QuadratureOptions& opts = {});

struct LRRow {
  double t = 0.0;
  double commutator_norm = 0.0;
  double bound_value = 0.0;
  Region region = Region::Interior;
};

struct LRReport {
  std::vector<LRRow> rows;
  Region worst_region = Region::Exterior;  // most singular tag over all t
  double expected = 0.0;                   // bound exponent, 0 for exponential
  FitReport fit;                           // envelope fit (power) or log-norm vs dist
  double mu = 0.0;                         // exterior: largest mu with norm <= e^{-mu dist}
  bool pass = false;
};

/// Lieb-Robinson style check for g translated by round(v_track t) at each
/// time. Power regimes use dense uniform times and an envelope fit; the
/// exterior regime uses dyadic times and an exponential fit in
/// dist(X - Y, t V_1).
LRReport lr_verify(const LatticeParams& p, const ComplexLatticeFunction& f,
                   const ComplexLatticeFunction& g, const TimeGrid& grid, double delta,
                   const VelocityPoint& v_track = VelocityPoint::Zero(),
                   const QuadratureOptions& opts = {});

/// "t,commutator_norm,bound_value,region_tag" with header.
void write_lr_csv(std::ostream& os, const LRReport& report);

}  // namespace kgl
