#ifndef LEVYLAB_QUADRATURE_HPP_
#define LEVYLAB_QUADRATURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "levylab/errors.hpp"

namespace levylab {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
  int min_depth = 2;
};

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double m, double fm,
                    double b, double fb, double whole, double tol, int depth,
                    const QuadratureOptions& opt) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(left + right)) {
    throw QuadratureError(a, b, left + right,
                          "non-finite integrand on [" + std::to_string(a) +
                              ", " + std::to_string(b) + "]");
  }
  // Below roundoff the estimate cannot improve; accept it.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(left) + std::abs(right));
  if (depth >= opt.min_depth && std::abs(delta) <= std::max(15.0 * tol, noise)) {
    return left + right + delta / 15.0;
  }
  if (depth >= opt.max_depth) {
    throw QuadratureError(a, b, left + right,
                          "adaptive Simpson did not converge on [" +
                              std::to_string(a) + ", " + std::to_string(b) +
                              "], error estimate " +
                              std::to_string(std::abs(delta) / 15.0));
  }
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1,
                      opt) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1,
                      opt);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction. Oriented: a > b flips sign.
template <class F>
double adaptive_simpson(const F& f, double a, double b,
                        const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, opt.abs_tol, 0,
                              opt);
}

namespace detail {

// Simpson on [a, b] with the endpoint values taken as one-sided limits from
// inside, so a jump sitting on a breakpoint does not pollute either piece.
template <class F>
double simpson_open(const F& f, double a, double b, const QuadratureOptions& opt) {
  const double m = 0.5 * (a + b);
  const double fa = f(std::nextafter(a, b)), fm = f(m), fb = f(std::nextafter(b, a));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, m, fm, b, fb, whole, opt.abs_tol, 0, opt);
}

}  // namespace detail

// Integrates over [a, b] after splitting at every breakpoint strictly inside.
// The tolerance is shared between pieces in proportion to their length.
template <class F>
double integrate_piecewise(const F& f, double a, double b,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(lo);
  for (double p : breakpoints) {
    if (p > lo && p < hi) cuts.push_back(p);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    QuadratureOptions piece = opt;
    piece.abs_tol = opt.abs_tol * (cuts[i + 1] - cuts[i]) / (hi - lo);
    total += detail::simpson_open(f, cuts[i], cuts[i + 1], piece);
  }
  return sign * total;
}

// 16-point Gauss-Legendre rule on [a, b]. Exact for polynomials of degree <= 31.
struct GaussLegendre16 {
  static constexpr std::array<double, 8> kNodes = {
      0.0950125098376374401853193, 0.2816035507792589132304605,
      0.4580167776572273863424194, 0.6178762444026437484466718,
      0.7554044083550030338951012, 0.8656312023878317438804679,
      0.9445750230732325760779884, 0.9894009349916499325961542};
  static constexpr std::array<double, 8> kWeights = {
      0.1894506104550684962853967, 0.1826034150449235888667637,
      0.1691565193950025381893121, 0.1495959888165767320815017,
      0.1246289712555338720524763, 0.0951585116824927848099251,
      0.0622535239386478928628438, 0.0271524594117540948517806};

  template <class F>
  static double integrate(const F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
      const double dx = half * kNodes[i];
      sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
  }

  // Applies the rule on each piece between breakpoints in (a, b); breakpoints
  // must be sorted ascending.
  template <class F>
  static double integrate_piecewise(const F& f, double a, double b,
                                    std::span<const double> breakpoints) {
    double total = 0.0;
    double left = a;
    for (double p : breakpoints) {
      if (p > left && p < b) {
        total += integrate(f, left, p);
        left = p;
      }
    }
    return total + integrate(f, left, b);
  }
};

}  // namespace levylab

#endif  // LEVYLAB_QUADRATURE_HPP_
