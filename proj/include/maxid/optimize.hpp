#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "maxid/errors.hpp"

namespace maxid {

struct ModeResult {
  double x;
  double value;
  bool at_boundary;  // maximum attained at a bracket endpoint
};

// Golden-section maximization of a unimodal function on [lo, hi].
// If the maximum sits on an endpoint, that endpoint is returned with the
// at_boundary flag set instead of throwing.
template <class F>
ModeResult find_mode(const F& h, double lo, double hi, double tol = 1e-8) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double hc = h(c), hd = h(d);
  while (b - a > tol) {
    if (hc > hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kInvPhi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kInvPhi * (b - a);
      hd = h(d);
    }
  }
  const double xm = 0.5 * (a + b);
  const double hm = h(xm);
  const double hlo = h(lo), hhi = h(hi);
  if (hlo >= hm && hlo >= hhi) return {lo, hlo, true};
  if (hhi >= hm) return {hi, hhi, true};
  return {xm, hm, false};
}

// Expands outward from x0 until h decreases on both sides, yielding a
// bracket containing an interior maximum of a unimodal h.
template <class F>
void expand_mode_bracket(const F& h, double x0, double step, double& lo,
                         double& hi, int max_steps = 200) {
  double s = step;
  lo = x0;
  double hl = h(lo);
  for (int i = 0; i < max_steps; ++i) {
    const double cand = lo - s;
    const double hc = h(cand);
    lo = cand;
    if (hc < hl) break;
    hl = hc;
    s *= 2.0;
    if (i + 1 == max_steps) throw Error("mode bracket: no left decrease");
  }
  s = step;
  hi = x0;
  double hr = h(hi);
  for (int i = 0; i < max_steps; ++i) {
    const double cand = hi + s;
    const double hc = h(cand);
    hi = cand;
    if (hc < hr) break;
    hr = hc;
    s *= 2.0;
    if (i + 1 == max_steps) throw Error("mode bracket: no right decrease");
  }
}

// Bisection for f(x)=0 on a bracketing interval [lo, hi] (f(lo), f(hi) of
// opposite sign).  Returns the midpoint once the interval is below xtol or
// |f| below ftol.
template <class F>
double bisect(const F& f, double lo, double hi, double xtol = 1e-13,
              double ftol = 0.0, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("bisect: endpoints do not bracket a root");
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0 || (ftol > 0.0 && std::abs(fm) <= ftol)) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= xtol * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace maxid
