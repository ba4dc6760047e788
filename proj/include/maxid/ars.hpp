#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "maxid/errors.hpp"
#include "maxid/rng.hpp"

namespace maxid {

// Unnormalized log-concave target on an open (possibly unbounded) interval.
struct LogConcaveTarget {
  std::function<double(double)> h;   // log density, up to a constant
  std::function<double(double)> dh;  // derivative of h
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
};

// Piecewise-linear envelopes of a concave log density: the upper hull is the
// pointwise minimum of tangents at the anchors, the lower hull the chord
// polygon (-inf outside the anchor range).  Anchors are kept sorted; slopes
// must be non-increasing up to `concavity_tol` or insertion throws
// ConcavityViolation.
class PiecewiseHull {
 public:
  PiecewiseHull(double support_lo, double support_hi,
                double concavity_tol = 1e-8)
      : lo_(support_lo), hi_(support_hi), tol_(concavity_tol) {}

  int size() const { return static_cast<int>(x_.size()); }
  double anchor(int i) const { return x_[i]; }
  double slope(int i) const { return dh_[i]; }

  void insert(double x, double h, double dh) {
    if (!std::isfinite(x) || !std::isfinite(h) || !std::isfinite(dh)) {
      throw DomainError("hull anchor with non-finite h or h'");
    }
    auto it = std::lower_bound(x_.begin(), x_.end(), x);
    const auto idx = static_cast<std::size_t>(it - x_.begin());
    if (idx < x_.size() && std::abs(x_[idx] - x) < 1e-13 * (1.0 + std::abs(x)))
      return;  // duplicate anchor, nothing to refine
    if (idx > 0 && std::abs(x_[idx - 1] - x) < 1e-13 * (1.0 + std::abs(x)))
      return;
    if (idx > 0 && dh > dh_[idx - 1] + tol_) {
      throw ConcavityViolation("h' increases left of new anchor");
    }
    if (idx < x_.size() && dh_[idx] > dh + tol_) {
      throw ConcavityViolation("h' increases right of new anchor");
    }
    x_.insert(x_.begin() + idx, x);
    h_.insert(h_.begin() + idx, h);
    dh_.insert(dh_.begin() + idx, dh);
    rebuild();
  }

  double upper(double x) const {
    const int j = segment_of(x);
    return h_[j] + dh_[j] * (x - x_[j]);
  }

  double lower(double x) const {
    if (x < x_.front() || x > x_.back())
      return -std::numeric_limits<double>::infinity();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    auto i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return h_.front();
    if (i == x_.size()) return h_.back();
    const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return h_[i - 1] + w * (h_[i] - h_[i - 1]);
  }

  // The envelope density s(x) ~ exp(upper) is integrable iff each unbounded
  // side has a strictly signed slope pushing mass inward.
  bool integrable() const {
    if (x_.empty()) return false;
    const bool left_ok = std::isfinite(lo_) || dh_.front() > 0.0;
    const bool right_ok = std::isfinite(hi_) || dh_.back() < 0.0;
    return left_ok && right_ok;
  }

  // Draws from the normalized density proportional to exp(upper(x)).
  double sample_envelope(RandomStream& rng) const {
    // Segment masses in log space, normalized by their maximum.
    const int n = size();
    double max_lm = -std::numeric_limits<double>::infinity();
    std::vector<double> lm(n);
    for (int j = 0; j < n; ++j) {
      lm[j] = segment_log_mass(j);
      max_lm = std::max(max_lm, lm[j]);
    }
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += std::exp(lm[j] - max_lm);
    double u = rng.uniform() * total;
    int j = 0;
    for (; j < n - 1; ++j) {
      const double w = std::exp(lm[j] - max_lm);
      if (u <= w) break;
      u -= w;
    }
    return sample_segment(j, rng.uniform());
  }

 private:
  // Segment j spans [edge_[j], edge_[j+1]] and carries the tangent at x_[j].
  void rebuild() {
    const int n = size();
    edge_.assign(n + 1, 0.0);
    edge_[0] = lo_;
    edge_[n] = hi_;
    for (int j = 0; j + 1 < n; ++j) {
      const double dm = dh_[j] - dh_[j + 1];
      if (dm <= 1e-14 * (std::abs(dh_[j]) + std::abs(dh_[j + 1]) + 1.0)) {
        edge_[j + 1] = 0.5 * (x_[j] + x_[j + 1]);
      } else {
        edge_[j + 1] =
            (h_[j + 1] - h_[j] - x_[j + 1] * dh_[j + 1] + x_[j] * dh_[j]) / dm;
      }
      // Numerical tangents can cross marginally outside the anchor gap.
      edge_[j + 1] = std::clamp(edge_[j + 1], x_[j], x_[j + 1]);
    }
  }

  int segment_of(double x) const {
    auto it = std::upper_bound(edge_.begin() + 1, edge_.end() - 1, x);
    return static_cast<int>(it - (edge_.begin() + 1));
  }

  // log of the integral of exp(h_j + m (x - x_j)) over segment j.
  double segment_log_mass(int j) const {
    const double a = edge_[j];
    const double b = edge_[j + 1];
    const double m = dh_[j];
    const double c = h_[j] - dh_[j] * x_[j];
    if (!std::isfinite(a) && !std::isfinite(b)) {
      throw NonIntegrableEnvelope("two-sided unbounded hull segment");
    }
    if (!std::isfinite(b)) {  // [a, inf), needs m < 0
      if (!(m < 0.0)) throw NonIntegrableEnvelope("flat right tail");
      return c + m * a - std::log(-m);
    }
    if (!std::isfinite(a)) {  // (-inf, b], needs m > 0
      if (!(m > 0.0)) throw NonIntegrableEnvelope("flat left tail");
      return c + m * b - std::log(m);
    }
    const double w = b - a;
    if (std::abs(m) * w < 1e-12) {
      return c + m * 0.5 * (a + b) + std::log(w);
    }
    const double top = m > 0.0 ? b : a;
    return c + m * top + std::log(-std::expm1(-std::abs(m) * w)) -
           std::log(std::abs(m));
  }

  // Inverse-CDF draw within segment j given u ~ Unif(0,1).
  double sample_segment(int j, double u) const {
    const double a = edge_[j];
    const double b = edge_[j + 1];
    const double m = dh_[j];
    if (!std::isfinite(b)) return a + std::log(u) / m;        // m < 0
    if (!std::isfinite(a)) return b + std::log(u) / m;        // m > 0
    const double w = b - a;
    if (std::abs(m) * w < 1e-12) return a + u * w;
    // x = a + log(1 + u (e^{m w} - 1)) / m, evaluated from the stable end.
    if (m > 0.0) {
      return b + std::log1p((u - 1.0) * -std::expm1(-m * w)) / m;
    }
    return a + std::log1p(u * std::expm1(m * w)) / m;
  }

  double lo_, hi_, tol_;
  std::vector<double> x_, h_, dh_;
  std::vector<double> edge_;
};

// Adaptive rejection sampling (Gilks & Wild): exact draws from a log-concave
// density given only h and h'.  The hull is refined with every rejected
// proposal; the squeeze test runs before any evaluation of h.
//
// If the initial anchors do not yield an integrable envelope, anchors are
// pushed outward automatically; failure to find a signed slope raises
// NonIntegrableEnvelope.
inline double ars_sample(const LogConcaveTarget& target,
                         const std::vector<double>& init_anchors,
                         RandomStream& rng, int max_rounds = 1000) {
  if (init_anchors.size() < 2) {
    throw DomainError("ars_sample: need at least two anchors");
  }
  PiecewiseHull hull(target.support_lo, target.support_hi);
  for (double x : init_anchors) {
    if (!(x > target.support_lo && x < target.support_hi)) {
      throw DomainError("ars_sample: anchor outside support");
    }
    hull.insert(x, target.h(x), target.dh(x));
  }

  // Expand outward until the envelope integrates.
  double step = std::max(1.0, hull.anchor(hull.size() - 1) - hull.anchor(0));
  for (int i = 0; i < 64 && !hull.integrable(); ++i) {
    if (!std::isfinite(target.support_lo) && !(hull.slope(0) > 0.0)) {
      const double x = hull.anchor(0) - step;
      hull.insert(x, target.h(x), target.dh(x));
    }
    if (!std::isfinite(target.support_hi) &&
        !(hull.slope(hull.size() - 1) < 0.0)) {
      const double x = hull.anchor(hull.size() - 1) + step;
      hull.insert(x, target.h(x), target.dh(x));
    }
    step *= 2.0;
    if (i == 63) {
      throw NonIntegrableEnvelope("no slope-sign bracket after expansion");
    }
  }
  if (!hull.integrable()) {
    throw NonIntegrableEnvelope("envelope not integrable");
  }

  for (int round = 0; round < max_rounds; ++round) {
    const double x = hull.sample_envelope(rng);
    const double u = rng.uniform();
    const double ux = hull.upper(x);
    if (u <= std::exp(hull.lower(x) - ux)) return x;  // squeeze
    const double hx = target.h(x);
    if (u <= std::exp(hx - ux)) return x;
    hull.insert(x, hx, target.dh(x));
  }
  throw Error("ars_sample: no acceptance within round budget");
}

}  // namespace maxid
