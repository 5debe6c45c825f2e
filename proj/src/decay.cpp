#include "kgl/decay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "kgl/csv.hpp"
#include "kgl/parallel.hpp"

namespace kgl {

namespace {

// Two-sided 95% Student-t quantiles for 1..30 degrees of freedom.
double t_quantile_975(int dof) {
  static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                     2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                     2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                     2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  if (dof <= 30) return table[dof - 1];
  return 1.960 + 2.46 / dof;
}

Site round_site(const Vec2& v, double t) {
  return {static_cast<int>(std::lround(v.x() * t)), static_cast<int>(std::lround(v.y() * t))};
}

}  // namespace

std::string to_string(FitMethod m) {
  switch (m) {
    case FitMethod::EnvelopeLogLog: return "envelope_loglog";
    case FitMethod::LinearInT: return "linear_in_t";
    case FitMethod::LinearInDistance: return "linear_in_distance";
  }
  return "?";
}

FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y, FitMethod method) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw InsufficientDataError("fit_line: need at least 3 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw InsufficientDataError("fit_line: abscissae coincide");
  FitReport r;
  r.method = method;
  r.points = static_cast<int>(n);
  r.exponent = sxy / sxx;
  r.intercept = my - r.exponent * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.intercept + r.exponent * x[i]);
    ss += e * e;
    r.fitted.emplace_back(x[i], y[i]);
  }
  r.residual_rms = std::sqrt(ss / n);
  const double se = std::sqrt(ss / (n - 2) / sxx);
  // A perfect fit still reports a strictly positive interval.
  r.ci_halfwidth = std::max(t_quantile_975(static_cast<int>(n) - 2) * se,
                            1e-12 * std::max(1.0, std::abs(r.exponent)));
  return r;
}

std::vector<double> TimeGrid::times() const {
  if (!(dt > 0) || !(t_max >= t_min) || !(t_min > 0)) {
    throw ConfigError("time grid needs 0 < t_min <= t_max and dt > 0");
  }
  const long count = static_cast<long>(std::floor((t_max - t_min) / dt + 1e-9)) + 1;
  std::vector<double> ts(count);
  for (long s = 0; s < count; ++s) ts[s] = t_min + dt * s;
  return ts;
}

TimeGrid TimeGrid::defaults(const LatticeParams& p) {
  if (p.wave_mode()) return {100.0, 1600.0, 1.0};
  return {50.0, 800.0, 0.1};
}

DecaySeries decay_scan(const LatticeParams& p, int m, const VelocityPoint& v,
                       const std::vector<double>& t_grid, const QuadratureOptions& opts) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw ConfigError("decay_scan: t_grid must be positive and increasing");
    }
  }
  DecaySeries series;
  series.params = p;
  series.m = m;
  series.velocity = v;
  series.samples.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    const Site x = round_site(v, t);
    series.samples[i] = {t, x, kernel(p, m, t, x, opts)};
  });
  return series;
}

DecaySeries decay_scan(const LatticeParams& p, int m, const VelocityPoint& v,
                       const TimeGrid& grid, const QuadratureOptions& opts) {
  const std::vector<double> ts = grid.times();
  // Chunk by dyadic window so early times run on the smaller grids.
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  std::size_t begin = 0;
  for (double edge = 2 * grid.t_min; begin < ts.size(); edge *= 2) {
    std::size_t end = begin;
    while (end < ts.size() && ts[end] < edge - 1e-9) ++end;
    if (end > begin) chunks.emplace_back(begin, end);
    begin = end;
  }
  DecaySeries series;
  series.params = p;
  series.m = m;
  series.velocity = v;
  series.samples.resize(ts.size());
  parallel_for(chunks.size(), [&](std::size_t c) {
    const auto [b, e] = chunks[c];
    const auto part = kernel_ray_scan(p, m, v, ts[b], grid.dt, static_cast<int>(e - b), opts);
    std::copy(part.begin(), part.end(), series.samples.begin() + b);
  });
  return series;
}

FitReport fit_power(const DecaySeries& series) {
  const auto& s = series.samples;
  if (s.size() < 4) throw InsufficientDataError("fit_power: fewer than four samples");
  const double t0 = s.front().t;
  const int windows = static_cast<int>(std::floor(std::log2(s.back().t / t0) + 1e-9));
  if (windows < 4) throw InsufficientDataError("fit_power: fewer than four dyadic windows");
  std::vector<double> x, y;
  for (int w = 0; w < windows; ++w) {
    const double lo = t0 * std::ldexp(1.0, w);
    const double hi = t0 * std::ldexp(1.0, w + 1);
    const bool last = w == windows - 1;
    double best = -1.0, best_t = 0.0;
    for (const auto& r : s) {
      if (r.t < lo * (1 - 1e-12)) continue;
      if (!last && r.t >= hi * (1 - 1e-12)) continue;
      if (std::abs(r.value) > best) {
        best = std::abs(r.value);
        best_t = r.t;
      }
    }
    if (!(best > 0.0)) throw InsufficientDataError("fit_power: empty or zero dyadic window");
    x.push_back(std::log(best_t));
    y.push_back(std::log(best));
  }
  FitReport r = fit_line(x, y, FitMethod::EnvelopeLogLog);
  r.t_min = t0;
  r.t_max = s.back().t;
  return r;
}

ExponentialFit fit_exponential(const LatticeParams& p, int m, double t, const Vec2& direction,
                               double r_min, double r_max, double delta,
                               const QuadratureOptions& opts) {
  if (t == 0.0) throw ConfigError("fit_exponential: t must be nonzero");
  if (direction.norm() == 0.0) throw ConfigError("fit_exponential: zero direction");
  const Vec2 u = direction.normalized();
  const auto atlas = cached_atlas(p);
  std::vector<Site> sites;
  for (double r = r_min; r <= r_max + 1e-9; r += 1.0) {
    const Site x = round_site(u, r);
    if (sites.empty() || !(sites.back() == x)) sites.push_back(x);
  }
  ExponentialFit out;
  out.samples.resize(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Vec2 v = Vec2(sites[i].x1, sites[i].x2) / t;
    const RegionTag tag = classify_velocity(*atlas, v, delta);
    if (tag.region != Region::Exterior) {
      throw RegionError("fit_exponential: sample (" + std::to_string(sites[i].x1) + ", " +
                        std::to_string(sites[i].x2) + ") is not exterior");
    }
    out.samples[i].x = sites[i];
    out.samples[i].dist = std::abs(t) * tag.dist_v1;
  }
  parallel_for(sites.size(), [&](std::size_t i) {
    const Vec2 mu = choose_contour_shift(p, t, sites[i]);
    out.samples[i].log_abs = kernel_shifted(p, m, t, sites[i], mu, opts).log_abs();
  });
  std::vector<double> d, l;
  out.mu_bound = std::numeric_limits<double>::infinity();
  for (const auto& s : out.samples) {
    if (!std::isfinite(s.log_abs)) continue;  // exact zero of an oscillation
    d.push_back(s.dist);
    l.push_back(s.log_abs);
    out.mu_bound = std::min(out.mu_bound, -s.log_abs / s.dist);
  }
  out.fit = fit_line(d, l, FitMethod::LinearInDistance);
  out.fit.t_min = out.fit.t_max = t;
  out.mu_slope = -out.fit.exponent;
  return out;
}

double lieb_robinson_velocity(const LatticeParams& p, double mu) {
  return (1.0 + 2.0 * std::sqrt(p.lambda1() + p.lambda2()) * std::sinh(0.5 * mu)) / mu;
}

std::vector<RegionFit> verify_regions(const LatticeParams& p, double delta, const TimeGrid& grid,
                                      int m, const QuadratureOptions& opts) {
  const auto atlas = cached_atlas(p);
  struct Ray {
    const char* name;
    VelocityPoint v;
    double expected;
    double lo, hi;
  };
  const double caustic_rate = 5.0 / 6.0;
  const double cone_rate = p.wave_mode() ? 2.0 / 3.0 : caustic_rate;
  const double cone_lo = p.wave_mode() ? -0.73 : -0.90;
  const double cone_hi = p.wave_mode() ? -0.60 : -0.78;
  const std::vector<Ray> rays = {
      {"cusp", atlas->v3[0], 0.75, -0.80, -0.70},
      {"psi2_arc", psi2_axis_point(p), caustic_rate, -0.90, -0.78},
      {"psi1_arc", psi1_axis_point(p), cone_rate, cone_lo, cone_hi},
      {"interior", VelocityPoint::Zero(), 1.0, -1.07, -0.93},
  };
  std::vector<RegionFit> rows;
  for (const Ray& ray : rays) {
    RegionFit row;
    row.region = ray.name;
    row.velocity = ray.v;
    row.expected = ray.expected;
    row.tag = classify_velocity(*atlas, ray.v, delta).region;
    row.fit = fit_power(decay_scan(p, m, ray.v, grid, opts));
    row.bound_satisfied = row.fit.exponent >= ray.lo && row.fit.exponent <= ray.hi;
    rows.push_back(std::move(row));
  }

  // Exterior: the kernel at dyadic times, evaluated on shifted contours.
  RegionFit ext;
  ext.region = "exterior";
  ext.velocity = 1.3 * atlas->max_speed * Vec2(1.0, 0.0);
  ext.expected = 0.0;
  ext.tag = classify_velocity(*atlas, ext.velocity, delta).region;
  std::vector<double> ts;
  for (double t = grid.t_min; t <= grid.t_max * (1 + 1e-12); t *= 2) ts.push_back(t);
  std::vector<double> logs(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    const Site x = round_site(ext.velocity, ts[i]);
    logs[i] = kernel_shifted(p, m, ts[i], x, choose_contour_shift(p, ts[i], x), opts).log_abs();
  });
  ext.fit = fit_line(ts, logs, FitMethod::LinearInT);
  ext.fit.t_min = ts.front();
  ext.fit.t_max = ts.back();
  ext.bound_satisfied = ext.fit.exponent < 0.0 && logs.back() < std::log(1e-12);
  rows.push_back(std::move(ext));
  return rows;
}

std::vector<GlobalMaxSample> global_max_scan(const LatticeParams& p,
                                             const std::vector<double>& t_grid, int margin,
                                             const QuadratureOptions& opts) {
  const double vmax = max_group_speed(p);
  std::vector<GlobalMaxSample> out(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    const int r = static_cast<int>(std::ceil(vmax * std::abs(t))) + margin;
    // The kernels are even in each coordinate: one quadrant suffices.
    const auto fields = kernel_fields(p, t, Window{0, r, 0, r}, opts);
    const Eigen::MatrixXd total =
        fields[0].values.cwiseAbs() + fields[1].values.cwiseAbs() + fields[2].values.cwiseAbs();
    Eigen::Index a = 0, b = 0;
    const double best = total.maxCoeff(&a, &b);
    out[i] = {t, Site{static_cast<int>(a), static_cast<int>(b)}, best};
  });
  return out;
}

double GlobalMaxReport::relative_spread() const { return std::abs(c_upper / c_lower - 1.0); }

GlobalMaxReport global_max_report(const LatticeParams& p, double t_min, double t_max, int count,
                                  const QuadratureOptions& opts) {
  if (count < 4) throw InsufficientDataError("global_max_report: need at least four times");
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) ts[i] = t_min * std::pow(t_max / t_min, double(i) / (count - 1));
  GlobalMaxReport rep;
  rep.samples = global_max_scan(p, ts, 8, opts);
  std::vector<double> x, y;
  for (const auto& s : rep.samples) {
    x.push_back(std::log(s.t));
    y.push_back(std::log(s.value));
  }
  rep.fit = fit_line(x, y, FitMethod::EnvelopeLogLog);
  rep.fit.t_min = t_min;
  rep.fit.t_max = t_max;
  rep.t_split = std::sqrt(t_min * t_max);
  double lo = 0, hi = 0;
  int nlo = 0, nhi = 0;
  for (const auto& s : rep.samples) {
    const double c = std::log(s.value) + 0.75 * std::log(s.t);
    if (s.t <= rep.t_split * (1 + 1e-12)) {
      lo += c;
      ++nlo;
    }
    if (s.t >= rep.t_split * (1 - 1e-12)) {
      hi += c;
      ++nhi;
    }
  }
  rep.c_lower = std::exp(lo / nlo);
  rep.c_upper = std::exp(hi / nhi);
  return rep;
}

void write_fit_csv(std::ostream& os, const std::vector<RegionFit>& rows) {
  os << "region,exponent,ci,t_min,t_max\n";
  for (const auto& r : rows) {
    os << r.region << ',' << csv::fmt(r.fit.exponent) << ',' << csv::fmt(r.fit.ci_halfwidth) << ','
       << csv::fmt(r.fit.t_min) << ',' << csv::fmt(r.fit.t_max) << '\n';
  }
}

void write_fit_text(std::ostream& os, const std::vector<RegionFit>& rows) {
  for (const auto& r : rows) {
    os << r.region << ": v = (" << r.velocity.x() << ", " << r.velocity.y() << "), "
       << to_string(r.tag) << ", " << to_string(r.fit.method) << " slope " << r.fit.exponent << " +- " << r.fit.ci_halfwidth;
    if (r.expected > 0) {
      os << " (bound -" << r.expected << ")";
    } else {
      os << " (exponential)";
    }
    os << (r.bound_satisfied ? " ok" : " VIOLATED") << '\n';
  }
}

}  // namespace kgl
