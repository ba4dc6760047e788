#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "maxid/errors.hpp"
#include "maxid/magnitude.hpp"
#include "maxid/normal.hpp"
#include "maxid/optimize.hpp"
#include "maxid/quadrature.hpp"
#include "maxid/rng.hpp"

namespace maxid {

// Univariate marginal law of the max-id process at a site: exponent measure
// Lambda(z), cdf G0 = exp(-Lambda), density, and quantile.
//
// Lambda is tabulated at construction on a grid roughly geometric in
// Lambda-space between 50 and 1e-12 and interpolated with a monotone cubic
// (Fritsch-Carlson) in (z, log Lambda).  cdf/quantile run off the table;
// exponent_at and the marginal intensity always integrate afresh.
//
// Lower endpoint of the support: 0 for the scale mixture (profiles scale a
// standard normal, and the magnitude mass diverges at 0, so Lambda(z) is
// infinite for z <= 0), -infinity for the location mixture.
class MarginalLaw {
 public:
  explicit MarginalLaw(const ScaleMeasure& m) : measure_(m) { build(); }
  explicit MarginalLaw(const LocationMeasure& m) : measure_(m) { build(); }

  Mixture mixture() const {
    return std::holds_alternative<ScaleMeasure>(measure_) ? Mixture::scale
                                                          : Mixture::location;
  }

  double lower_endpoint() const {
    return mixture() == Mixture::scale
               ? 0.0
               : -std::numeric_limits<double>::infinity();
  }

  // Exponent measure Lambda(z) = Lambda({eta : eta(s0) > z}) by fresh
  // adaptive quadrature at relative tolerance 1e-9.
  double exponent_at(double z) const {
    check_above_endpoint(z);
    QuadratureOptions opt;
    opt.rel_tol = 1e-9;
    if (mixture() == Mixture::scale) {
      const auto& m = std::get<ScaleMeasure>(measure_);
      auto lg = [&](double t) {
        return safe_logsf(z * std::exp(-t)) + m.log_intensity_t(t);
      };
      auto f = [&](double t) { return std::exp(lg(t)); };
      const double mode = log_mode(lg, std::log(std::max(z, 1.0)));
      return integrate_real_line(f, mode - 1.0, mode + 1.0, opt);
    }
    const auto& m = std::get<LocationMeasure>(measure_);
    auto lg = [&](double r) {
      return safe_logsf(z - r) + m.log_intensity(r);
    };
    auto f = [&](double r) { return std::exp(lg(r)); };
    const double mode = log_mode(lg, std::abs(z) > 0.5 ? z : 0.75);
    return integrate_real_line(f, std::min(mode - 1.0, -0.5),
                               std::max(mode + 1.0, 0.5), opt, {0.0});
  }

  // Marginal intensity lambda(z) = -d Lambda / dz (fresh quadrature).
  double intensity_at(double z) const {
    check_above_endpoint(z);
    QuadratureOptions opt;
    opt.rel_tol = 1e-9;
    if (mixture() == Mixture::scale) {
      const auto& m = std::get<ScaleMeasure>(measure_);
      auto lg = [&](double t) {
        const double x = z * std::exp(-t);
        return norm_logpdf(x) + m.log_intensity_t(t) - t;
      };
      auto f = [&](double t) { return std::exp(lg(t)); };
      const double mode = log_mode(lg, std::log(std::max(z, 1.0)));
      return integrate_real_line(f, mode - 1.0, mode + 1.0, opt);
    }
    const auto& m = std::get<LocationMeasure>(measure_);
    auto lg = [&](double r) {
      return norm_logpdf(z - r) + m.log_intensity(r);
    };
    auto f = [&](double r) { return std::exp(lg(r)); };
    const double mode = log_mode(lg, std::abs(z) > 0.5 ? z : 0.75);
    return integrate_real_line(f, std::min(mode - 1.0, -0.5),
                               std::max(mode + 1.0, 0.5), opt, {0.0});
  }

  double cdf(double z) const {
    if (z < zg_.front()) return 0.0;
    return std::exp(-std::exp(interp(z)));
  }

  // Interpolated exponent measure (table-backed companion of exponent_at).
  double exponent_interp(double z) const {
    check_above_endpoint(z);
    return std::exp(interp(z));
  }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("quantile: p must be in (0,1)");
    }
    return quantile_from_exponent(-std::log(p));
  }

  // z such that the tabulated Lambda(z) equals `lambda_target`; the engine
  // feeds cumulative exponential sums through this to avoid ever forming
  // exp(-E0).
  double quantile_from_exponent(double lambda_target) const {
    if (!(lambda_target >= yg_exp_back_ && lambda_target <= yg_exp_front_)) {
      throw TabulationRangeExceeded(
          "quantile level outside tabulated range: Lambda=" +
          std::to_string(lambda_target));
    }
    const double yt = std::log(lambda_target);
    // y is strictly decreasing in z; locate the bracketing knot interval.
    int lo = 0, hi = static_cast<int>(zg_.size()) - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (yg_[mid] >= yt) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double a = zg_[lo], b = zg_[hi];
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      const double ym = interp(mid);
      if (std::abs(ym - yt) <= 2.5e-10) return mid;
      if (ym > yt) {
        a = mid;
      } else {
        b = mid;
      }
      if (b - a <= 1e-15 * (1.0 + std::abs(mid))) break;
    }
    return 0.5 * (a + b);
  }

  // Marginal density g0(z) = exp(-Lambda(z)) * lambda(z).
  double density(double z) const {
    check_above_endpoint(z);
    if (z < zg_.front()) return 0.0;
    return std::exp(-std::exp(interp(z))) * intensity_at(z);
  }

  // One step of the level cascade: E' = E + Exp(1), z' = G0^{-1}(exp(-E')).
  std::pair<double, double> next_level(double E, RandomStream& rng) const {
    if (!(E >= 0.0)) throw DomainError("next_level: E must be >= 0");
    const double e_next = E + rng.exponential();
    return {e_next, quantile_from_exponent(e_next)};
  }

  // Table accessors (diagnostics and tests).
  const std::vector<double>& grid_z() const { return zg_; }
  const std::vector<double>& grid_log_exponent() const { return yg_; }
  double table_exponent_max() const { return yg_exp_front_; }
  double table_exponent_min() const { return yg_exp_back_; }

  const std::variant<ScaleMeasure, LocationMeasure>& measure() const {
    return measure_;
  }

 private:
  void check_above_endpoint(double z) const {
    if (!(z > lower_endpoint())) {
      throw DomainError("marginal law: z at or below the lower endpoint");
    }
  }

  static double safe_logsf(double x) {
    if (std::isinf(x)) {
      return x > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    }
    return norm_logsf(x);
  }

  template <class F>
  static double log_mode(const F& lg, double x0) {
    double lo, hi;
    expand_mode_bracket(lg, x0, 0.5, lo, hi);
    return find_mode(lg, lo, hi, 1e-6).x;
  }

  void build() {
    if (mixture() == Mixture::scale) {
      std::get<ScaleMeasure>(measure_).validate();
    } else {
      std::get<LocationMeasure>(measure_).validate();
    }
    constexpr double kLamHi = 50.0;
    constexpr double kLamLo = 1e-12;
    constexpr int kPoints = 2048;

    // Bracket z at both Lambda extremes, then bisect.
    const double z_top = solve_exponent(kLamHi);
    const double dy =
        (std::log(kLamLo) - std::log(kLamHi)) / (kPoints - 1);

    zg_.clear();
    yg_.clear();
    zg_.reserve(kPoints + 64);
    yg_.reserve(kPoints + 64);
    zg_.push_back(z_top);
    yg_.push_back(std::log(exponent_at(z_top)));

    // Secant walk toward decreasing Lambda; grid positions drift slightly
    // from the exact geometric targets, which is harmless since actual
    // (z, Lambda) pairs are stored.
    double slope;  // d(log Lambda)/dz, negative
    {
      const double z1 = z_top + (std::abs(z_top) + 1e-6) * 1e-4;
      const double y1 = std::log(exponent_at(z1));
      slope = (y1 - yg_.front()) / (z1 - z_top);
      zg_.push_back(z1);
      yg_.push_back(y1);
    }
    const double y_stop = std::log(kLamLo) - 0.2;
    while (static_cast<int>(zg_.size()) < kPoints + 64) {
      const double y_prev = yg_.back();
      if (y_prev <= y_stop) break;
      double dz = dy / slope;
      if (!(dz > 0.0) || !std::isfinite(dz)) {
        dz = zg_.back() - zg_[zg_.size() - 2];
      }
      const double z_next = zg_.back() + dz;
      const double y_next = std::log(exponent_at(z_next));
      if (!(z_next > zg_.back()) || !(y_next < y_prev)) {
        throw Error("marginal table walk lost monotonicity");
      }
      slope = (y_next - y_prev) / (z_next - zg_.back());
      zg_.push_back(z_next);
      yg_.push_back(y_next);
    }
    yg_exp_front_ = std::exp(yg_.front());
    yg_exp_back_ = std::exp(yg_.back());
    build_pchip();
  }

  // Finds z with Lambda(z) = target by doubling-bracket plus bisection.
  double solve_exponent(double target) const {
    double lo, hi;  // Lambda(lo) > target > Lambda(hi)
    if (mixture() == Mixture::scale) {
      lo = 1.0;
      while (exponent_at(lo) < target) lo *= 0.5;
      hi = std::max(2.0 * lo, 1.0);
      while (exponent_at(hi) > target) hi *= 2.0;
    } else {
      lo = -1.0;
      while (exponent_at(lo) < target) lo = 2.0 * lo - 1.0;
      hi = 1.0;
      while (exponent_at(hi) > target) hi = 2.0 * hi + 1.0;
    }
    return bisect(
        [&](double z) { return std::log(exponent_at(z) / target); }, lo, hi,
        1e-14, 1e-10);
  }

  void build_pchip() {
    const int n = static_cast<int>(zg_.size());
    mg_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      h[i] = zg_[i + 1] - zg_[i];
      delta[i] = (yg_[i + 1] - yg_[i]) / h[i];
    }
    mg_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    mg_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    for (int i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        mg_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        mg_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
  }

  static double end_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  // Hermite evaluation of y = log Lambda at z, linear extrapolation with the
  // boundary slope outside the table.
  double interp(double z) const {
    const int n = static_cast<int>(zg_.size());
    if (z <= zg_.front()) return yg_.front() + mg_.front() * (z - zg_.front());
    if (z >= zg_.back()) return yg_.back() + mg_.back() * (z - zg_.back());
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (zg_[mid] <= z) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double hw = zg_[hi] - zg_[lo];
    const double t = (z - zg_[lo]) / hw;
    const double y0 = yg_[lo], y1 = yg_[hi];
    const double m0 = mg_[lo] * hw, m1 = mg_[hi] * hw;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
  }

  std::variant<ScaleMeasure, LocationMeasure> measure_;
  std::vector<double> zg_;  // increasing z knots
  std::vector<double> yg_;  // log Lambda at knots, strictly decreasing
  std::vector<double> mg_;  // monotone Hermite slopes
  double yg_exp_front_ = 0.0;
  double yg_exp_back_ = 0.0;
};

}  // namespace maxid
