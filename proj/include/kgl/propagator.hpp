#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kgl/types.hpp"

namespace kgl {

/// Integer lattice point.
struct Site {
  int x1 = 0;
  int x2 = 0;
  bool operator==(const Site&) const = default;
  auto operator<=>(const Site&) const = default;
};

/// Inclusive rectangle [x1_min, x1_max] x [x2_min, x2_max] of Z^2.
struct Window {
  int x1_min = 0, x1_max = 0, x2_min = 0, x2_max = 0;

  static Window square(int r) { return {-r, r, -r, r}; }
  int rows() const { return x1_max - x1_min + 1; }
  int cols() const { return x2_max - x2_min + 1; }
  bool contains(const Site& s) const {
    return s.x1 >= x1_min && s.x1 <= x1_max && s.x2 >= x2_min && s.x2 <= x2_max;
  }
};

struct QuadratureOptions {
  int max_grid = 1 << 14;  // largest torus grid N per direction
  double tol = 1e-9;       // absolute change between N and 2N
};

/// Kernel multiplier K_m(gamma) in
/// H^(m)_t(x) = (2 pi)^-2 int cos(k.x) K_m(gamma(k)) dk:
///   K_0 = cos(t gamma), K_-1 = -sin(t gamma) / gamma, K_1 = -gamma sin(t gamma).
/// All three are entire in gamma^2, so gamma = 0 needs no special care
/// beyond the removable limit K_-1 -> -t.
double kernel_multiplier(int m, double t, double gamma);
std::complex<double> kernel_multiplier(int m, double t, std::complex<double> gamma);

/// Grid size chosen before refinement: the next power of two at least
/// v_max |t| + |x|_inf + 64.
int initial_grid(const LatticeParams& p, double t, int reach);

/// H^(m)_t(x) by trapezoidal quadrature, doubled until converged.
/// Throws ResolutionError when N would exceed opts.max_grid.
double kernel(const LatticeParams& p, int m, double t, const Site& x,
              const QuadratureOptions& opts = {});

/// As kernel() with the grid size reported.
struct KernelValue {
  double value = 0.0;
  int grid_n = 0;
};
KernelValue kernel_with_grid(const LatticeParams& p, int m, double t, const Site& x,
                             const QuadratureOptions& opts = {});

/// H^(m)_t(round(v t) + offset) for t = t0 + s dt, s = 0..count-1, on one grid.
/// The grid is the converged size at the last sample (the largest t and
/// |x|), and cos / sin (t gamma) advance by phasor rotation with an exact
/// re-anchor every 64 steps. Much cheaper than count calls to kernel().
struct RaySample {
  double t = 0.0;
  Site x;
  double value = 0.0;
};
std::vector<RaySample> kernel_ray_scan(const LatticeParams& p, int m, const Vec2& v, double t0,
                                       double dt, int count, const QuadratureOptions& opts = {},
                                       const Site& offset = {});

/// Values of H^(m)_t on a window; rows follow x1, columns x2.
struct PropagatorField {
  LatticeParams params{1.0, 1.0, 1.0};
  int m = 0;
  double t = 0.0;
  Window window;
  Eigen::MatrixXd values;
  int grid_n = 0;

  double at(const Site& s) const {
    return values(s.x1 - window.x1_min, s.x2 - window.x2_min);
  }
};

PropagatorField kernel_field(const LatticeParams& p, int m, double t, const Window& window,
                             const QuadratureOptions& opts = {});

/// The three kernels m = -1, 0, 1 on one window, sharing the gamma grid.
std::array<PropagatorField, 3> kernel_fields(const LatticeParams& p, double t,
                                             const Window& window,
                                             const QuadratureOptions& opts = {});

/// H^(m)_t(x) evaluated on the shifted torus k + i mu. The shift moves
/// the integrand's size from e^{0} to e^{-mu.x}, so exponentially small
/// values keep full relative precision. Converged by grid doubling.
/// The result is scaled * exp(log_factor), kept apart so that values far
/// below the double range still have a usable logarithm.
struct ShiftedKernelValue {
  double scaled = 0.0;
  double log_factor = 0.0;
  int grid_n = 0;
  double value() const { return scaled * std::exp(log_factor); }
  double log_abs() const { return std::log(std::abs(scaled)) + log_factor; }
};
ShiftedKernelValue kernel_shifted(const LatticeParams& p, int m, double t, const Site& x,
                                  const Vec2& mu, const QuadratureOptions& opts = {});

/// Shift along x chosen to maximise mu.x - |t| max Im gamma(k + i mu)
/// over a ladder of magnitudes; returns zero when no shift helps.
Vec2 choose_contour_shift(const LatticeParams& p, double t, const Site& x);

// ---------------------------------------------------------------------------
// Finite-volume oracles on the periodic box (-L, L]^2.

struct LatticeState {
  int L = 0;
  Eigen::MatrixXd u;  // displacement, index (x1 mod 2L, x2 mod 2L)
  Eigen::MatrixXd p;  // velocity u_t

  explicit LatticeState(int half_width = 1);
  int size() const { return 2 * L; }
  int wrap(int x) const {
    const int n = 2 * L;
    return ((x % n) + n) % n;
  }
  double& u_at(const Site& s) { return u(wrap(s.x1), wrap(s.x2)); }
  double u_at(const Site& s) const { return u(wrap(s.x1), wrap(s.x2)); }
  double& p_at(const Site& s) { return p(wrap(s.x1), wrap(s.x2)); }
  double p_at(const Site& s) const { return p(wrap(s.x1), wrap(s.x2)); }

  static LatticeState delta(int half_width, const Site& at = {});
};

/// Exact evolution u = cos(t sqrt H) g + sin(t sqrt H)/sqrt H h,
/// u_t = -sqrt H sin(t sqrt H) g + cos(t sqrt H) h, by diagonalising H
/// with the discrete Fourier transform. initial.L must be a power of two >= 64.
LatticeState spectral_evolution(const LatticeParams& params, const LatticeState& initial, double t);

/// Kick-drift-kick integration. The number of steps is ceil(t / dt) with
/// the step shrunk to land on t exactly. Throws StabilityError unless
/// dt < 2 / gamma_max.
LatticeState leapfrog_evolution(const LatticeParams& params, const LatticeState& initial,
                                double t, double dt);

/// E = 1/2 sum_x [p^2 + omega^2 u^2 + sum_j lambda_j (u(x + e_j) - u(x))^2].
double energy(const LatticeParams& params, const LatticeState& state);

// ---------------------------------------------------------------------------
// Export.

/// "x1,x2,value" with header.
void write_field_csv(std::ostream& os, const PropagatorField& field);

/// Little-endian binary dump: 32-byte header (magic "KGF1", int32 m,
/// float64 t, int16 x1_min, x1_max, x2_min, x2_max, uint32 grid_n,
/// 4 zero bytes) followed by rows() * cols() float64 values, row-major.
void write_field_binary(std::ostream& os, const PropagatorField& field);
PropagatorField read_field_binary(std::istream& is, const LatticeParams& p);

/// Clears the memoised single-site kernel values.
void clear_kernel_cache();

}  // namespace kgl
