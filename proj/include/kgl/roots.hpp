#pragma once

#include <cmath>
#include <utility>

#include "kgl/errors.hpp"

namespace kgl {

/// Root of f on [lo, hi] given opposite signs at the ends. Regula falsi
/// with the Illinois weight, falling back to bisection whenever the secant
/// step fails to shrink the bracket by half.
template <class Fn>
double solve_bracketed(Fn&& f, double lo, double hi, double xtol = 1e-15,
                       int max_iter = 400) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw ConvergenceError("solve_bracketed: endpoints do not bracket a root");
  }
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double width = hi - lo;
    if (std::abs(width) <= xtol * (1.0 + std::abs(lo) + std::abs(hi))) break;
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > std::min(lo, hi) && x < std::max(lo, hi)) || it % 3 == 2) {
      x = 0.5 * (lo + hi);
    }
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

}  // namespace kgl
