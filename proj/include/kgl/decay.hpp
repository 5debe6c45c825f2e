#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kgl/propagator.hpp"
#include "kgl/velocity.hpp"

namespace kgl {

/// Kernel values along a ray x = round(v t).
struct DecaySeries {
  LatticeParams params{1.0, 1.0, 1.0};
  int m = 0;
  VelocityPoint velocity = VelocityPoint::Zero();
  std::vector<RaySample> samples;  // t strictly increasing
  std::string note = "x_used = nearest lattice point to v t";
};

enum class FitMethod { EnvelopeLogLog, LinearInT, LinearInDistance };

std::string to_string(FitMethod m);

struct FitReport {
  double exponent = 0.0;      // slope of the fitted line
  double intercept = 0.0;
  double ci_halfwidth = 0.0;  // 95% half-width of the slope, always > 0
  double t_min = 0.0;
  double t_max = 0.0;
  FitMethod method = FitMethod::EnvelopeLogLog;
  double residual_rms = 0.0;
  int points = 0;
  std::vector<std::pair<double, double>> fitted;  // (abscissa, log value) used
};

/// Least-squares line through (x, y) with a Student-t 95% slope interval.
FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y, FitMethod method);

/// Uniform sampling t = t_min + s dt up to t_max.
struct TimeGrid {
  double t_min = 50.0;
  double t_max = 800.0;
  double dt = 0.1;

  std::vector<double> times() const;
  /// Defaults: [50, 800] for omega > 0, [100, 1600] in wave mode.
  static TimeGrid defaults(const LatticeParams& p);
};

/// Kernel sampled at round(v t) for each t (independent evaluations).
DecaySeries decay_scan(const LatticeParams& p, int m, const VelocityPoint& v,
                       const std::vector<double>& t_grid, const QuadratureOptions& opts = {});

/// Same values on a uniform grid via per-window batched ray scans.
DecaySeries decay_scan(const LatticeParams& p, int m, const VelocityPoint& v,
                       const TimeGrid& grid, const QuadratureOptions& opts = {});

/// Envelope fit: the largest |value| in each dyadic window
/// [t0 2^j, t0 2^(j+1)) (the last window closed) against its time, on log
/// axes. Needs at least four complete windows; throws InsufficientDataError.
FitReport fit_power(const DecaySeries& series);

/// Exterior samples along a direction at fixed t.
struct ExteriorSample {
  Site x;
  double dist = 0.0;     // Euclidean distance from x to t * closure(V_1)
  double log_abs = 0.0;  // log |H(x)|, from the shifted-contour evaluation
};

struct ExponentialFit {
  FitReport fit;         // log|H| against distance
  double mu_slope = 0;   // -fit.exponent
  double mu_bound = 0;   // largest mu with |H| <= exp(-mu dist) at every sample
  std::vector<ExteriorSample> samples;
};

/// Samples x = round(r u) for r = r_min, r_min + 1, ..., r_max with u the
/// unit direction. Every x / t must classify as Exterior with the given
/// delta; otherwise RegionError.
ExponentialFit fit_exponential(const LatticeParams& p, int m, double t, const Vec2& direction,
                               double r_min, double r_max, double delta = 0.05,
                               const QuadratureOptions& opts = {});

/// Growth bound v_mu = (1 + 2 sqrt(lambda1 + lambda2) sinh(mu / 2)) / mu
/// of the uniform exponential estimate.
double lieb_robinson_velocity(const LatticeParams& p, double mu);

/// One row of the region table.
struct RegionFit {
  std::string region;
  VelocityPoint velocity = VelocityPoint::Zero();
  double expected = 0.0;  // bound exponent; 0 marks the exponential case
  Region tag = Region::Interior;  // classification of the velocity
  FitReport fit;
  bool bound_satisfied = false;
};

/// Fits one representative ray per region (cusp, Psi_2 arc, Psi_1, origin,
/// exterior) and checks each exponent against its bound.
std::vector<RegionFit> verify_regions(const LatticeParams& p, double delta, const TimeGrid& grid,
                                      int m, const QuadratureOptions& opts = {});

/// max over the window |x| <= v_max t + margin of sum_m |H^(m)_t(x)|.
struct GlobalMaxSample {
  double t = 0.0;
  Site argmax;
  double value = 0.0;
};
std::vector<GlobalMaxSample> global_max_scan(const LatticeParams& p,
                                             const std::vector<double>& t_grid, int margin = 8,
                                             const QuadratureOptions& opts = {});

/// Constant C in value ~ C t^(-3/4) fitted separately on the lower and
/// upper halves (in log t) of the range.
struct GlobalMaxReport {
  std::vector<GlobalMaxSample> samples;
  FitReport fit;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double t_split = 0.0;
  double relative_spread() const;  // |c_upper / c_lower - 1|
};
GlobalMaxReport global_max_report(const LatticeParams& p, double t_min, double t_max, int count,
                                  const QuadratureOptions& opts = {});

/// "region,exponent,ci,t_min,t_max" with header.
void write_fit_csv(std::ostream& os, const std::vector<RegionFit>& rows);
void write_fit_text(std::ostream& os, const std::vector<RegionFit>& rows);

}  // namespace kgl
