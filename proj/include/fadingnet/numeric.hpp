#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace fadingnet {

/// Raised when a bracketed maximization finds its best grid point on the
/// search boundary.
class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numeric {

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 50) {
  if (!(b >= a)) {
    throw std::invalid_argument("integrate: need a <= b");
  }
  if (a == b) {
    return 0.0;
  }
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

struct Maximum {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

struct GridMaximum {
  std::size_t index = 0;
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Evaluates f on `points` evenly spaced nodes of [lo, hi] and returns the
/// first node attaining the largest value. NaN evaluations are ignored.
template <typename F>
GridMaximum grid_maximize(const F& f, double lo, double hi, std::size_t points) {
  if (points < 3 || !(hi > lo)) {
    throw std::invalid_argument("grid_maximize: need at least 3 points on a nonempty interval");
  }
  GridMaximum best;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + step * static_cast<double>(i);
    const double v = f(x);
    if (v > best.value) {
      best = {i, x, v};
    }
  }
  return best;
}

/// Golden-section search for a maximum of a unimodal f on [a, b]; stops when
/// the bracket is narrower than `tol`.
template <typename F>
Maximum golden_section_maximize(const F& f, double a, double b, double tol, int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Coarse grid over [lo, hi] followed by golden-section refinement inside the
/// two cells around the best node. `to_native` maps the search coordinate to
/// the caller's coordinate; refinement continues until the native bracket is
/// narrower than `native_tol`. Throws OptimizationError when the best node is
/// an endpoint of the grid.
template <typename F, typename Map>
Maximum bracketed_maximize(const F& f, double lo, double hi, std::size_t points, double native_tol,
                           const Map& to_native, const std::string& what) {
  const GridMaximum coarse = grid_maximize(f, lo, hi, points);
  if (!std::isfinite(coarse.value)) {
    throw OptimizationError(what + ": objective is not finite anywhere on the grid");
  }
  if (coarse.index == 0 || coarse.index + 1 == points) {
    throw OptimizationError(what + ": grid maximum lies on the search boundary (no interior maximum)");
  }
  const double step = (hi - lo) / static_cast<double>(points - 1);
  double a = coarse.x - step;
  double b = coarse.x + step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 1000 && std::abs(to_native(b) - to_native(a)) > native_tol && (b - a) > 0.0;
       ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double v = f(x);
  if (v < coarse.value) {
    return {coarse.x, coarse.value};
  }
  return {x, v};
}

}  // namespace numeric
}  // namespace fadingnet
