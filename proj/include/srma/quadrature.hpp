#pragma once

#include "srma/types.hpp"

#include <cmath>
#include <string>

namespace srma {

namespace detail {

template <typename F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= max_depth)
    throw QuadratureNotConverged("adaptive Simpson exceeded depth " + std::to_string(max_depth) +
                                 " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
/// Throws QuadratureNotConverged past `max_depth` bisections.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 60) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 0, max_depth);
}

/// Integral of f(origin + x) for x in [first, cutoff], split into doubling
/// panels [first, 2 first], [2 first, 4 first], ... . `first` must be > 0.
/// The caller chooses `cutoff` so the neglected tail is below tolerance.
template <typename F>
double integrate_doubling_panels(F&& f, double origin, double first, double cutoff, double tol,
                                 int max_depth = 60) {
  int panels = 1;
  for (double e = first; e * 2.0 < cutoff; e *= 2.0) ++panels;
  const double panel_tol = tol / panels;
  double total = 0.0;
  double lo = first;
  while (lo < cutoff) {
    const double hi = std::min(2.0 * lo, cutoff);
    total += adaptive_simpson([&](double x) { return f(origin + x); }, lo, hi, panel_tol, max_depth);
    lo = hi;
  }
  return total;
}

}  // namespace srma
