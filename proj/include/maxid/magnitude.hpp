#pragma once

#include <cmath>
#include <limits>

#include "maxid/errors.hpp"
#include "maxid/optimize.hpp"

namespace maxid {

enum class Mixture { scale, location };

inline const char* mixture_name(Mixture m) {
  return m == Mixture::scale ? "scale" : "location";
}

// Weibull-tailed magnitude measure on (0,inf):
//   kappa([r,inf)) = r^-beta * exp{-alpha (r^beta - 1)/beta},  beta > 0,
// with beta = 0 admitted as the max-stable power-law boundary r^-alpha.
struct ScaleMeasure {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const {
    if (!(alpha > 0.0)) throw ConfigError("scale measure: alpha must be > 0");
    if (!(beta >= 0.0)) throw ConfigError("scale measure: beta must be >= 0");
  }

  double tail_mass(double r) const {
    if (!(r > 0.0)) throw DomainError("scale measure: r must be > 0");
    const double t = std::log(r);
    if (beta == 0.0) return std::exp(-alpha * t);
    // expm1 keeps the exponent accurate as beta*log(r) -> 0.
    return std::exp(-beta * t - alpha * std::expm1(beta * t) / beta);
  }

  // Intensity -d kappa/dr.
  double intensity(double r) const {
    if (!(r > 0.0)) throw DomainError("scale measure: r must be > 0");
    if (beta == 0.0) return alpha * std::pow(r, -alpha - 1.0);
    const double t = std::log(r);
    const double weib = std::exp(-alpha * std::expm1(beta * t) / beta);
    return (beta * std::exp(-(beta + 1.0) * t) + alpha * std::exp(-t)) * weib;
  }

  // log intensity of R expressed in t = log r, including the Jacobian:
  // the density of T = log R is intensity(e^t) * e^t.  Written in
  // log-sum-exp form so it stays finite for any finite t.
  double log_intensity_t(double t) const {
    if (beta == 0.0) return std::log(alpha) - alpha * t;
    const double a1 = std::log(beta) - beta * t;
    const double a2 = std::log(alpha);
    const double m = std::max(a1, a2);
    return m + std::log1p(std::exp(std::min(a1, a2) - m)) -
           alpha * std::expm1(beta * t) / beta;
  }

  double dlog_intensity_t(double t) const {
    if (beta == 0.0) return -alpha;
    return -beta * beta / (beta + alpha * std::exp(beta * t)) -
           alpha * std::exp(beta * t);
  }

  // Safeguarded Newton on x = log r for log kappa(e^x) = log m; the log
  // tail mass -beta x - (alpha/beta) expm1(beta x) is concave decreasing
  // with analytic slope, so this converges in a handful of steps.
  double inverse_tail_mass(double m) const {
    if (!(m > 0.0)) throw DomainError("scale measure: mass must be > 0");
    if (beta == 0.0) return std::pow(m, -1.0 / alpha);
    if (m == 1.0) return 1.0;
    const double target = std::log(m);
    auto f = [&](double x) {
      return -beta * x - alpha * std::expm1(beta * x) / beta - target;
    };
    double lo, hi;  // log-scale bracket with f(lo) > 0 > f(hi)
    if (m < 1.0) {
      lo = 0.0;
      hi = 1.0;
      while (f(hi) > 0.0) hi *= 2.0;
    } else {
      hi = 0.0;
      lo = -1.0;
      while (f(lo) < 0.0) lo *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 100; ++i) {
      const double fx = f(x);
      if (std::abs(fx) < 1e-13) break;
      if (fx > 0.0) {
        lo = x;
      } else {
        hi = x;
      }
      const double slope = -beta - alpha * std::exp(beta * x);
      double next = x - fx / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    return std::exp(x);
  }
};

// Two-sided magnitude measure on R (Gaussian location mixtures):
//   kappa([r,inf)) = exp(-alpha r^beta1)        for r >= 0,
//   kappa([r,inf)) = exp(+alpha |r|^beta2)      for r < 0,
// strictly decreasing with kappa(0) = 1.  beta2 < 2 keeps the exponent
// measure finite against the Gaussian profile tails.
struct LocationMeasure {
  double alpha = 1.0;
  double beta1 = 1.0;
  double beta2 = 1.0;

  void validate() const {
    if (!(alpha > 0.0))
      throw ConfigError("location measure: alpha must be > 0");
    if (!(beta1 > 0.0))
      throw ConfigError("location measure: beta1 must be > 0");
    if (!(beta2 > 0.0 && beta2 < 2.0))
      throw ConfigError("location measure: beta2 must be in (0,2)");
  }

  double tail_mass(double r) const {
    if (r >= 0.0) return std::exp(-alpha * std::pow(r, beta1));
    return std::exp(alpha * std::pow(-r, beta2));
  }

  double intensity(double r) const {
    if (r > 0.0) {
      return alpha * beta1 * std::pow(r, beta1 - 1.0) *
             std::exp(-alpha * std::pow(r, beta1));
    }
    if (r < 0.0) {
      return alpha * beta2 * std::pow(-r, beta2 - 1.0) *
             std::exp(alpha * std::pow(-r, beta2));
    }
    // One-sided limit from the right; infinite when beta1 < 1.
    if (beta1 > 1.0) return 0.0;
    if (beta1 == 1.0) return alpha;
    return std::numeric_limits<double>::infinity();
  }

  // The point r = 0 is a null set; -inf there keeps quadrature nodes and MH
  // proposals finite even when beta < 1 makes the intensity diverge.
  double log_intensity(double r) const {
    if (r > 0.0) {
      return std::log(alpha * beta1) + (beta1 - 1.0) * std::log(r) -
             alpha * std::pow(r, beta1);
    }
    if (r < 0.0) {
      return std::log(alpha * beta2) + (beta2 - 1.0) * std::log(-r) +
             alpha * std::pow(-r, beta2);
    }
    return -std::numeric_limits<double>::infinity();
  }

  double inverse_tail_mass(double m) const {
    if (!(m > 0.0)) throw DomainError("location measure: mass must be > 0");
    if (m == 1.0) return 0.0;
    if (m < 1.0) return std::pow(-std::log(m) / alpha, 1.0 / beta1);
    return -std::pow(std::log(m) / alpha, 1.0 / beta2);
  }
};

}  // namespace maxid
