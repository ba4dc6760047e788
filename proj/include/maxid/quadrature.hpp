#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "maxid/errors.hpp"

namespace maxid {

namespace detail {

// Gauss7/Kronrod15 nodes and weights on [-1,1]; nodes listed for the
// positive half (index 7 is the center).
inline constexpr double kK15x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kK15w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7w[4] = {0.129484966168870, 0.279705391489277,
                                   0.381830050505119, 0.417959183673469};

struct GkResult {
  double value;
  double error;
};

template <class F>
GkResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double k15 = kK15w[7] * f(c);
  double g7 = kG7w[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double dx = hw * kK15x[i];
    const double fsum = f(c - dx) + f(c + dx);
    k15 += kK15w[i] * fsum;
    if (i % 2 == 1) g7 += kG7w[i / 2] * fsum;
  }
  k15 *= hw;
  g7 *= hw;
  return {k15, std::abs(k15 - g7)};
}

}  // namespace detail

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;      // additional absolute floor on the error target
  int max_intervals = 8192;  // subdivision budget
};

// Adaptive Gauss-Kronrod integration on a finite interval.  Integrable
// endpoint singularities are fine as long as the integrand is finite at the
// interior Kronrod nodes; callers should split at any interior singularity.
template <class F>
double integrate(const F& f, double a, double b,
                 const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  auto first = detail::gk15(f, a, b);
  heap.push({a, b, first.value, first.error});
  double total = first.value;
  double err = first.error;
  int used = 1;
  while (err > std::max(opt.rel_tol * std::abs(total), opt.abs_tol)) {
    if (used >= opt.max_intervals || heap.empty()) {
      throw QuadratureError("adaptive quadrature: tolerance not met after " +
                            std::to_string(used) + " intervals");
    }
    const Piece worst = heap.top();
    heap.pop();
    if (!(worst.b - worst.a > 0.0) ||
        worst.b - worst.a < 1e-15 * (std::abs(worst.a) + std::abs(worst.b))) {
      // Interval at floating-point resolution; accept its estimate as-is.
      if (heap.empty()) break;
      total += 0.0;
      err -= worst.error;
      continue;
    }
    const double m = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, m);
    auto right = detail::gk15(f, m, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push({worst.a, m, left.value, left.error});
    heap.push({m, worst.b, right.value, right.error});
    ++used;
  }
  if (!std::isfinite(total)) {
    throw QuadratureError("adaptive quadrature: non-finite result");
  }
  return total;
}

// Integral of a nonnegative integrand over (-inf, inf) that decays to zero
// in both directions away from a core region [core_lo, core_hi].  The core
// is integrated adaptively and window-doubled tails are appended until their
// contribution is negligible relative to the running total.  `core_splits`
// marks interior points (integrable singularities, kinks) that must land on
// panel boundaries.
template <class F>
double integrate_real_line(const F& f, double core_lo, double core_hi,
                           const QuadratureOptions& opt = {},
                           const std::vector<double>& core_splits = {}) {
  if (!(core_hi > core_lo)) {
    const double c = core_lo;
    core_lo = c - 0.5;
    core_hi = c + 0.5;
  }
  QuadratureOptions copt = opt;
  std::vector<double> cuts{core_lo};
  for (double s : core_splits) {
    if (s > core_lo && s < core_hi) cuts.push_back(s);
  }
  cuts.push_back(core_hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate(f, cuts[i], cuts[i + 1], copt);
  }
  const double tail_tol_factor = 0.05 * opt.rel_tol;

  double w = core_hi - core_lo;
  double hi = core_hi;
  for (int i = 0; i < 64; ++i) {
    QuadratureOptions topt = opt;
    topt.abs_tol = std::max(opt.abs_tol,
                            0.1 * opt.rel_tol * std::abs(total));
    const double piece = integrate(f, hi, hi + w, topt);
    total += piece;
    hi += w;
    w *= 2.0;
    if (std::abs(piece) <= tail_tol_factor * std::abs(total)) break;
    if (i == 63) throw QuadratureError("right tail did not converge");
  }
  w = core_hi - core_lo;
  double lo = core_lo;
  for (int i = 0; i < 64; ++i) {
    QuadratureOptions topt = opt;
    topt.abs_tol = std::max(opt.abs_tol,
                            0.1 * opt.rel_tol * std::abs(total));
    const double piece = integrate(f, lo - w, lo, topt);
    total += piece;
    lo -= w;
    w *= 2.0;
    if (std::abs(piece) <= tail_tol_factor * std::abs(total)) break;
    if (i == 63) throw QuadratureError("left tail did not converge");
  }
  return total;
}

}  // namespace maxid
