#include "kgl/propagator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <tuple>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "kgl/csv.hpp"
#include "kgl/phase.hpp"
#include "kgl/velocity.hpp"

namespace kgl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_m(int m) {
  if (m < -1 || m > 1) throw ConfigError("kernel index m must be -1, 0 or 1");
}

// Trapezoid weights on the half grid k_i = 2 pi i / n, i = 0..n/2: interior
// nodes stand for the pair {i, n - i}.
double half_weight(int i, int n) { return (i == 0 || 2 * i == n) ? 1.0 : 2.0; }

// 4 lambda sin^2(k / 2) on the half grid.
std::vector<double> half_grid_dispersion(double lambda, int n) {
  std::vector<double> s(n / 2 + 1);
  for (int i = 0; i <= n / 2; ++i) {
    const double h = std::sin(kPi * i / n);
    s[i] = 4.0 * lambda * h * h;
  }
  return s;
}

using CacheKey = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, int, std::uint64_t, int,
                            int, int, std::uint64_t>;
std::mutex g_cache_mutex;
std::map<CacheKey, KernelValue> g_cache;

}  // namespace

double kernel_multiplier(int m, double t, double g) {
  switch (m) {
    case 0: return std::cos(t * g);
    case 1: return -g * std::sin(t * g);
    default: {
      const double tg = t * g;
      if (std::abs(tg) < 1e-4) return -t * (1.0 - tg * tg / 6.0);
      return -std::sin(tg) / g;
    }
  }
}

std::complex<double> kernel_multiplier(int m, double t, std::complex<double> g) {
  switch (m) {
    case 0: return std::cos(t * g);
    case 1: return -g * std::sin(t * g);
    default: {
      const std::complex<double> tg = t * g;
      if (std::abs(tg) < 1e-4) return -t * (1.0 - tg * tg / 6.0);
      return -std::sin(tg) / g;
    }
  }
}

int initial_grid(const LatticeParams& p, double t, int reach) {
  // Aliased copies sit at |x + N j|_inf >= N - reach, which must lie well
  // outside the light cone of radius v_max |t|.
  const double need = max_group_speed(p) * std::abs(t) + reach + 64.0;
  int n = 64;
  while (n < need) n *= 2;
  return n;
}

KernelValue kernel_with_grid(const LatticeParams& p, int m, double t, const Site& x,
                             const QuadratureOptions& opts) {
  check_m(m);
  // The kernel is even in each coordinate.
  const int x1 = std::abs(x.x1), x2 = std::abs(x.x2);
  const CacheKey key{std::bit_cast<std::uint64_t>(p.omega()),
                     std::bit_cast<std::uint64_t>(p.lambda1()),
                     std::bit_cast<std::uint64_t>(p.lambda2()),
                     m,
                     std::bit_cast<std::uint64_t>(t),
                     x1,
                     x2,
                     opts.max_grid,
                     std::bit_cast<std::uint64_t>(opts.tol)};
  {
    std::lock_guard lock(g_cache_mutex);
    if (auto it = g_cache.find(key); it != g_cache.end()) return it->second;
  }

  const double w2 = p.omega() * p.omega();
  for (int n = initial_grid(p, t, std::max(x1, x2));; n *= 2) {
    // One pass over the 2n grid yields both the n and 2n estimates: the
    // coarse nodes are the even-even fine nodes with the same weights.
    const int nf = 2 * n;
    if (nf > opts.max_grid) {
      throw ResolutionError("kernel: grid " + std::to_string(nf) + " exceeds max_grid " +
                            std::to_string(opts.max_grid));
    }
    const int h = nf / 2;
    const auto s1 = half_grid_dispersion(p.lambda1(), nf);
    const auto s2 = half_grid_dispersion(p.lambda2(), nf);
    std::vector<double> c1(h + 1), c2(h + 1);
    for (int i = 0; i <= h; ++i) {
      c1[i] = half_weight(i, nf) * std::cos(2 * kPi * double((1LL * i * x1) % nf) / nf);
      c2[i] = half_weight(i, nf) * std::cos(2 * kPi * double((1LL * i * x2) % nf) / nf);
    }
    double fine = 0.0, coarse = 0.0;
    std::vector<double> row(h + 1);
    for (int i = 0; i <= h; ++i) {
      for (int j = 0; j <= h; ++j) {
        row[j] = c2[j] * kernel_multiplier(m, t, std::sqrt(w2 + s1[i] + s2[j]));
      }
      double rf = 0.0, rc = 0.0;
      for (int j = 0; j <= h; ++j) rf += row[j];
      if (i % 2 == 0) {
        for (int j = 0; j <= h; j += 2) rc += row[j];
        coarse += c1[i] * rc;
      }
      fine += c1[i] * rf;
    }
    fine /= double(nf) * nf;
    coarse *= 4.0 / (double(nf) * nf);
    if (std::abs(fine - coarse) < opts.tol) {
      const KernelValue out{fine, nf};
      std::lock_guard lock(g_cache_mutex);
      g_cache.emplace(key, out);
      return out;
    }
  }
}

double kernel(const LatticeParams& p, int m, double t, const Site& x,
              const QuadratureOptions& opts) {
  return kernel_with_grid(p, m, t, x, opts).value;
}

std::vector<RaySample> kernel_ray_scan(const LatticeParams& p, int m, const Vec2& v, double t0,
                                       double dt, int count, const QuadratureOptions& opts,
                                       const Site& offset) {
  check_m(m);
  if (count <= 0) return {};
  auto site_at = [&](double t) {
    return Site{static_cast<int>(std::lround(v.x() * t)) + offset.x1,
                static_cast<int>(std::lround(v.y() * t)) + offset.x2};
  };
  const double t_end = t0 + dt * (count - 1);
  // Aliasing error grows with t and |x|, so the last sample fixes the grid.
  const int nf = kernel_with_grid(p, m, t_end, site_at(t_end), opts).grid_n;
  const int h = nf / 2;
  const std::size_t cells = std::size_t(h + 1) * (h + 1);
  const auto s1 = half_grid_dispersion(p.lambda1(), nf);
  const auto s2 = half_grid_dispersion(p.lambda2(), nf);
  const double w2 = p.omega() * p.omega();

  std::vector<double> g(cells), coef(cells);
  for (int i = 0; i <= h; ++i) {
    for (int j = 0; j <= h; ++j) g[std::size_t(i) * (h + 1) + j] = std::sqrt(w2 + s1[i] + s2[j]);
  }
  for (std::size_t c = 0; c < cells; ++c) coef[c] = 2.0 * std::cos(dt * g[c]);

  // K_m(t) restricted to the grid satisfies K(t + dt) = coef K(t) - K(t - dt)
  // for every m, so one sequence per cell suffices.
  std::vector<double> prev(cells), cur(cells);
  auto anchor = [&](std::vector<double>& dst, double t) {
    for (std::size_t c = 0; c < cells; ++c) dst[c] = kernel_multiplier(m, t, g[c]);
  };

  std::vector<RaySample> out(count);
  std::vector<double> c1(h + 1), c2(h + 1);
  for (int s = 0; s < count; ++s) {
    const double t = t0 + dt * s;
    if (s % 64 == 0) {
      anchor(prev, t - dt);
      anchor(cur, t);
    }
    const Site x = site_at(t);
    for (int i = 0; i <= h; ++i) {
      c1[i] = half_weight(i, nf) * std::cos(2 * kPi * double((1LL * i * std::abs(x.x1)) % nf) / nf);
      c2[i] = half_weight(i, nf) * std::cos(2 * kPi * double((1LL * i * std::abs(x.x2)) % nf) / nf);
    }
    double total = 0.0;
    for (int i = 0; i <= h; ++i) {
      const std::size_t base = std::size_t(i) * (h + 1);
      double* pr = prev.data() + base;
      const double* cu = cur.data() + base;
      const double* co = coef.data() + base;
      double row = 0.0;
      for (int j = 0; j <= h; ++j) {
        row += c2[j] * cu[j];
        pr[j] = co[j] * cu[j] - pr[j];
      }
      total += c1[i] * row;
    }
    std::swap(prev, cur);
    out[s] = {t, x, total / (double(nf) * nf)};
  }
  return out;
}

void clear_kernel_cache() {
  std::lock_guard lock(g_cache_mutex);
  g_cache.clear();
}

std::array<PropagatorField, 3> kernel_fields(const LatticeParams& p, double t,
                                             const Window& window,
                                             const QuadratureOptions& opts) {
  if (window.rows() <= 0 || window.cols() <= 0) throw ConfigError("kernel_field: empty window");
  // Distinct |x_j| values: the kernel is even in each coordinate.
  auto abs_range = [](int lo, int hi) {
    std::vector<int> v;
    for (int x = lo; x <= hi; ++x) v.push_back(std::abs(x));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto ax1 = abs_range(window.x1_min, window.x1_max);
  const auto ax2 = abs_range(window.x2_min, window.x2_max);
  const int reach = std::max(ax1.back(), ax2.back());
  const double w2 = p.omega() * p.omega();

  for (int n = initial_grid(p, t, reach);; n *= 2) {
    const int nf = 2 * n;
    if (nf > opts.max_grid) {
      throw ResolutionError("kernel_field: grid " + std::to_string(nf) + " exceeds max_grid " +
                            std::to_string(opts.max_grid));
    }
    const int h = nf / 2, hc = n / 2;
    const auto s1 = half_grid_dispersion(p.lambda1(), nf);
    const auto s2 = half_grid_dispersion(p.lambda2(), nf);
    auto cos_table = [&](const std::vector<int>& xs, int grid, int stride) {
      Eigen::MatrixXd c(grid / 2 + 1, xs.size());
      for (int i = 0; i <= grid / 2; ++i) {
        for (std::size_t r = 0; r < xs.size(); ++r) {
          // Same node as fine index stride * i; reduce the phase exactly.
          const long long phase = (1LL * stride * i * xs[r]) % nf;
          c(i, r) = half_weight(i, grid) * std::cos(2 * kPi * phase / nf);
        }
      }
      return c;
    };
    const Eigen::MatrixXd C1 = cos_table(ax1, nf, 1), C2 = cos_table(ax2, nf, 1);
    const Eigen::MatrixXd C1c = cos_table(ax1, n, 2), C2c = cos_table(ax2, n, 2);

    Eigen::MatrixXd M(h + 1, h + 1);
    Eigen::MatrixXd Mc(hc + 1, hc + 1);
    std::array<Eigen::MatrixXd, 3> fine, coarse;
    double diff = 0.0;
    for (int m = -1; m <= 1; ++m) {
      for (int j = 0; j <= h; ++j) {
        for (int i = 0; i <= h; ++i) {
          M(i, j) = kernel_multiplier(m, t, std::sqrt(w2 + s1[i] + s2[j]));
        }
      }
      for (int j = 0; j <= hc; ++j) {
        for (int i = 0; i <= hc; ++i) Mc(i, j) = M(2 * i, 2 * j);
      }
      fine[m + 1] = (C1.transpose() * M * C2) / (double(nf) * nf);
      coarse[m + 1] = (C1c.transpose() * Mc * C2c) / (double(n) * n);
      diff = std::max(diff, (fine[m + 1] - coarse[m + 1]).cwiseAbs().maxCoeff());
    }
    if (diff >= opts.tol) continue;

    std::array<PropagatorField, 3> out;
    for (int m = -1; m <= 1; ++m) {
      PropagatorField& f = out[m + 1];
      f.params = p;
      f.m = m;
      f.t = t;
      f.window = window;
      f.grid_n = nf;
      f.values.resize(window.rows(), window.cols());
      for (int r = 0; r < window.rows(); ++r) {
        const auto i = std::lower_bound(ax1.begin(), ax1.end(), std::abs(window.x1_min + r)) -
                       ax1.begin();
        for (int c = 0; c < window.cols(); ++c) {
          const auto j = std::lower_bound(ax2.begin(), ax2.end(), std::abs(window.x2_min + c)) -
                         ax2.begin();
          f.values(r, c) = fine[m + 1](i, j);
        }
      }
    }
    return out;
  }
}

PropagatorField kernel_field(const LatticeParams& p, int m, double t, const Window& window,
                             const QuadratureOptions& opts) {
  check_m(m);
  return kernel_fields(p, t, window, opts)[m + 1];
}

ShiftedKernelValue kernel_shifted(const LatticeParams& p, int m, double t, const Site& x,
                                  const Vec2& mu, const QuadratureOptions& opts) {
  check_m(m);
  using C = std::complex<double>;
  const double w2 = p.omega() * p.omega();
  const double decay = mu.x() * x.x1 + mu.y() * x.x2;
  // Also accumulates sum |integrand|, the scale of the rounding noise.
  auto shifted_sum = [&](int n, int stride, int nf, const std::vector<C>& d1,
                         const std::vector<C>& d2, double& scale) {
    C total = 0.0;
    scale = 0.0;
    for (int i = 0; i < nf; i += stride) {
      const C e1 = std::polar(1.0, 2 * kPi * double((1LL * i * x.x1) % nf) / nf);
      C row = 0.0;
      for (int j = 0; j < nf; j += stride) {
        const C e2 = std::polar(1.0, 2 * kPi * double((1LL * j * x.x2) % nf) / nf);
        const C k = kernel_multiplier(m, t, std::sqrt(w2 + d1[i] + d2[j]));
        row += e2 * k;
        scale += std::abs(k);
      }
      total += e1 * row;
    }
    scale /= double(n) * n;
    return total / (double(n) * n);
  };
  for (int n = initial_grid(p, t, std::max(std::abs(x.x1), std::abs(x.x2)));; n *= 2) {
    const int nf = 2 * n;
    if (nf > opts.max_grid) {
      throw ResolutionError("kernel_shifted: grid exceeds max_grid");
    }
    std::vector<C> d1(nf), d2(nf);
    for (int i = 0; i < nf; ++i) {
      const C h1 = std::sin(0.5 * C(2 * kPi * i / nf, mu.x()));
      const C h2 = std::sin(0.5 * C(2 * kPi * i / nf, mu.y()));
      d1[i] = 4.0 * p.lambda1() * h1 * h1;
      d2[i] = 4.0 * p.lambda2() * h2 * h2;
    }
    double scale = 0.0, unused = 0.0;
    const C fine = shifted_sum(nf, 1, nf, d1, d2, scale);
    const C coarse = shifted_sum(n, 2, nf, d1, d2, unused);
    // Below the noise floor the result is only an upper bound, which is
    // all the exterior estimates need.
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * scale;
    if (std::abs(fine - coarse) <= std::max(opts.tol * std::abs(fine), floor)) {
      return {fine.real(), -decay, nf};
    }
  }
}

Vec2 choose_contour_shift(const LatticeParams& p, double t, const Site& x) {
  const Vec2 xv(x.x1, x.x2);
  if (xv.norm() == 0.0) return Vec2::Zero();
  const Vec2 dir = xv.normalized();
  Vec2 best = Vec2::Zero();
  double best_gain = 0.0;
  for (double s = 0.25; s <= 8.0; s += 0.25) {
    const Vec2 mu = s * dir;
    const double gain = mu.dot(xv) - std::abs(t) * complex_gamma_extrema(p, mu, 64).max_imag;
    if (gain > best_gain) {
      best_gain = gain;
      best = mu;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

LatticeState::LatticeState(int half_width) : L(half_width) {
  if (half_width < 1) throw ConfigError("LatticeState: L must be positive");
  u = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  p = Eigen::MatrixXd::Zero(2 * L, 2 * L);
}

LatticeState LatticeState::delta(int half_width, const Site& at) {
  LatticeState s(half_width);
  s.u_at(at) = 1.0;
  return s;
}

namespace {

using CMatrix = Eigen::MatrixXcd;

void fft2(CMatrix& a, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(a.rows()), out(a.rows());
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      for (Eigen::Index r = 0; r < a.rows(); ++r) in[r] = a(r, c);
      if (inverse) {
        fft.inv(out, in);
      } else {
        fft.fwd(out, in);
      }
      for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = out[r];
    }
    a.transposeInPlace();
  }
}

}  // namespace

LatticeState spectral_evolution(const LatticeParams& params, const LatticeState& initial,
                                double t) {
  const int L = initial.L;
  if (L < 64 || (L & (L - 1)) != 0) {
    throw ConfigError("spectral_evolution: L must be a power of two >= 64");
  }
  if (t == 0.0) return initial;
  const int n = 2 * L;
  CMatrix u = initial.u.cast<std::complex<double>>();
  CMatrix v = initial.p.cast<std::complex<double>>();
  fft2(u, false);
  fft2(v, false);
  std::vector<double> d1(n), d2(n);
  for (int i = 0; i < n; ++i) {
    const double h = std::sin(kPi * i / n);
    d1[i] = 4.0 * params.lambda1() * h * h;
    d2[i] = 4.0 * params.lambda2() * h * h;
  }
  const double w2 = params.omega() * params.omega();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double g = std::sqrt(w2 + d1[i] + d2[j]);
      const double c = std::cos(t * g);
      const double sinc = -kernel_multiplier(-1, t, g);  // sin(t g) / g
      const double gs = -kernel_multiplier(1, t, g);     // g sin(t g)
      const std::complex<double> u0 = u(i, j), v0 = v(i, j);
      u(i, j) = c * u0 + sinc * v0;
      v(i, j) = -gs * u0 + c * v0;
    }
  }
  fft2(u, true);
  fft2(v, true);
  LatticeState out(L);
  out.u = u.real();
  out.p = v.real();
  return out;
}

namespace {

// acceleration -(H u) with periodic wrap.
void accelerate(const LatticeParams& params, const Eigen::MatrixXd& u, Eigen::MatrixXd& a) {
  const Eigen::Index n = u.rows();
  const double w2 = params.omega() * params.omega();
  const double l1 = params.lambda1(), l2 = params.lambda2();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp = j + 1 == n ? 0 : j + 1;
    const Eigen::Index jm = j == 0 ? n - 1 : j - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index ip = i + 1 == n ? 0 : i + 1;
      const Eigen::Index im = i == 0 ? n - 1 : i - 1;
      const double c = u(i, j);
      a(i, j) = -w2 * c + l1 * (u(ip, j) + u(im, j) - 2 * c) + l2 * (u(i, jp) + u(i, jm) - 2 * c);
    }
  }
}

}  // namespace

LatticeState leapfrog_evolution(const LatticeParams& params, const LatticeState& initial,
                                double t, double dt) {
  if (!(dt > 0.0) || !(dt < 2.0 / params.gamma_max())) {
    throw StabilityError("leapfrog_evolution: dt must satisfy 0 < dt < 2 / gamma_max");
  }
  if (t == 0.0) return initial;
  const long steps = static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9));
  const double h = t / steps;
  LatticeState s = initial;
  Eigen::MatrixXd a(s.u.rows(), s.u.cols());
  accelerate(params, s.u, a);
  for (long k = 0; k < steps; ++k) {
    s.p += 0.5 * h * a;
    s.u += h * s.p;
    accelerate(params, s.u, a);
    s.p += 0.5 * h * a;
  }
  return s;
}

double energy(const LatticeParams& params, const LatticeState& s) {
  const Eigen::Index n = s.u.rows();
  const double w2 = params.omega() * params.omega();
  double e = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp = j + 1 == n ? 0 : j + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index ip = i + 1 == n ? 0 : i + 1;
      const double u = s.u(i, j);
      const double d1 = s.u(ip, j) - u, d2 = s.u(i, jp) - u;
      e += s.p(i, j) * s.p(i, j) + w2 * u * u + params.lambda1() * d1 * d1 +
           params.lambda2() * d2 * d2;
    }
  }
  return 0.5 * e;
}

// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& os, const PropagatorField& field) {
  os << "x1,x2,value\n";
  for (int r = 0; r < field.window.rows(); ++r) {
    for (int c = 0; c < field.window.cols(); ++c) {
      os << field.window.x1_min + r << ',' << field.window.x2_min + c << ','
         << csv::fmt(field.values(r, c)) << '\n';
    }
  }
}

namespace {

template <class U>
void put_le(std::ostream& os, U bits) {
  for (std::size_t b = 0; b < sizeof(U); ++b) os.put(static_cast<char>((bits >> (8 * b)) & 0xff));
}

template <class U>
U get_le(std::istream& is) {
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw ConfigError("field dump truncated");
    bits |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return bits;
}

}  // namespace

void write_field_binary(std::ostream& os, const PropagatorField& field) {
  const Window& w = field.window;
  for (int v : {w.x1_min, w.x1_max, w.x2_min, w.x2_max}) {
    if (v < -32768 || v > 32767) throw ConfigError("field window exceeds the int16 header range");
  }
  os.write("KGF1", 4);
  put_le(os, static_cast<std::uint32_t>(static_cast<std::int32_t>(field.m)));
  put_le(os, std::bit_cast<std::uint64_t>(field.t));
  for (int v : {w.x1_min, w.x1_max, w.x2_min, w.x2_max}) {
    put_le(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  put_le(os, static_cast<std::uint32_t>(field.grid_n));
  put_le(os, std::uint32_t{0});
  for (int r = 0; r < w.rows(); ++r) {
    for (int c = 0; c < w.cols(); ++c) put_le(os, std::bit_cast<std::uint64_t>(field.values(r, c)));
  }
}

PropagatorField read_field_binary(std::istream& is, const LatticeParams& p) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "KGF1") {
    throw ConfigError("not a KGF1 field dump");
  }
  PropagatorField f;
  f.params = p;
  f.m = static_cast<std::int32_t>(get_le<std::uint32_t>(is));
  f.t = std::bit_cast<double>(get_le<std::uint64_t>(is));
  f.window.x1_min = static_cast<std::int16_t>(get_le<std::uint16_t>(is));
  f.window.x1_max = static_cast<std::int16_t>(get_le<std::uint16_t>(is));
  f.window.x2_min = static_cast<std::int16_t>(get_le<std::uint16_t>(is));
  f.window.x2_max = static_cast<std::int16_t>(get_le<std::uint16_t>(is));
  f.grid_n = static_cast<int>(get_le<std::uint32_t>(is));
  get_le<std::uint32_t>(is);
  f.values.resize(f.window.rows(), f.window.cols());
  for (int r = 0; r < f.window.rows(); ++r) {
    for (int c = 0; c < f.window.cols(); ++c) {
      f.values(r, c) = std::bit_cast<double>(get_le<std::uint64_t>(is));
    }
  }
  return f;
}

}  // namespace kgl
