#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxid/errors.hpp"

namespace maxid {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double norm_logpdf(double x) {
  return -0.5 * x * x - 0.91893853320467274178;  // log(sqrt(2*pi))
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Upper tail P(X > x), accurate in the far right tail.
inline double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// log P(X > x), finite for every finite x.  erfc underflows near x = 38, so
// the far tail switches to the asymptotic expansion of Mills' ratio.
inline double norm_logsf(double x) {
  if (!(x > 20.0)) {
    return std::log(norm_sf(x));
  }
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  const double x2 = x * x;
  const double corr = std::log1p(-1.0 / x2 + 3.0 / (x2 * x2) -
                                 15.0 / (x2 * x2 * x2) +
                                 105.0 / (x2 * x2 * x2 * x2));
  return norm_logpdf(x) - std::log(x) + corr;
}

namespace detail {

// Gauss-Legendre nodes/weights on (0,1) halves, as used by Genz's BVND.
inline constexpr double kGL6x[3] = {0.9324695142031521, 0.6612093864662645,
                                    0.2386191860831969};
inline constexpr double kGL6w[3] = {0.1713244923791704, 0.3607615730481386,
                                    0.4679139345726910};
inline constexpr double kGL12x[6] = {0.9815606342467192, 0.9041172563704749,
                                     0.7699026741943047, 0.5873179542866175,
                                     0.3678314989981802, 0.1252334085114689};
inline constexpr double kGL12w[6] = {0.04717533638651183, 0.1069393259953184,
                                     0.1600783285433462,  0.2031674267230659,
                                     0.2334925365383548,  0.2491470458134028};
inline constexpr double kGL20x[10] = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
    0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
    0.5108670019508271, 0.3737060887154195, 0.2277858511416451,
    0.07652652113349734};
inline constexpr double kGL20w[10] = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410907,
    0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
    0.1316886384491766,  0.1420961093183820,  0.1491729864726037,
    0.1527533871307258};

}  // namespace detail

// Upper orthant probability P(X > h, Y > k) for a standard bivariate normal
// pair with correlation rho.  Algorithm of Genz (2004), itself a refinement
// of Drezner & Wesolowsky; absolute accuracy is well below 1e-13.
inline double bvn_upper(double h, double k, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    if (rho == 1.0) return norm_sf(std::max(h, k));
    if (rho == -1.0) {
      const double p = norm_sf(h) + norm_sf(k) - 1.0;
      return p > 0.0 ? p : 0.0;
    }
    throw DomainError("bvn_upper: correlation outside [-1,1]");
  }

  const double* gx;
  const double* gw;
  int ng;
  const double arho = std::abs(rho);
  if (arho < 0.3) {
    gx = detail::kGL6x;
    gw = detail::kGL6w;
    ng = 3;
  } else if (arho < 0.75) {
    gx = detail::kGL12x;
    gw = detail::kGL12w;
    ng = 6;
  } else {
    gx = detail::kGL20x;
    gw = detail::kGL20w;
    ng = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (arho < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(rho);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
        bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (4.0 * kPi) + norm_sf(h) * norm_sf(k);
  } else {
    double kk = k;
    if (rho < 0.0) {
      kk = -kk;
      hk = -hk;
    }
    const double as0 = (1.0 - rho) * (1.0 + rho);
    double a = std::sqrt(as0);
    const double bs = (h - kk) * (h - kk);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as0 + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as0) * (1.0 - d * bs / 5.0) / 3.0 +
             c * d * as0 * as0 / 5.0);
    }
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(2.0 * kPi) * norm_cdf(-b / a) *
             b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double x = a * (is * gx[i] + 1.0);
        const double xs = x * x;
        const double rs = std::sqrt(1.0 - xs);
        asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * gw[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / (2.0 * kPi);
    if (rho > 0.0) {
      bvn += norm_sf(std::max(h, kk));
    } else {
      bvn = -bvn;
      if (kk > h) bvn += norm_cdf(kk) - norm_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// P(X <= a, Y <= b) for standard bivariate normal with correlation rho.
inline double bivariate_normal_cdf(double a, double b, double rho) {
  return bvn_upper(-a, -b, rho);
}

}  // namespace maxid
