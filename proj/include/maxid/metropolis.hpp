#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "maxid/errors.hpp"
#include "maxid/optimize.hpp"
#include "maxid/rng.hpp"

namespace maxid {

struct MhConfig {
  double sigma = 1.0;  // proposal stddev on the chain's scale
  int iterations = 100;
  // Chain start; NaN requests automatic mode search.
  double init = std::numeric_limits<double>::quiet_NaN();

  void validate() const {
    if (!(sigma > 0.0)) throw ConfigError("mh: sigma must be > 0");
    if (iterations < 1) throw ConfigError("mh: iterations must be >= 1");
  }
};

enum class ChainSupport { real_line, positive };

// Random-walk Metropolis-Hastings for an unnormalized log density of r.
// On positive support the chain walks in x = log r with proposal
// N(x, sigma^2) and the Jacobian r folded into the acceptance ratio; on the
// real line it walks r directly.  Returns the state after
// config.iterations steps.
inline double mh_sample(const std::function<double(double)>& log_density,
                        ChainSupport support, const MhConfig& config,
                        RandomStream& rng) {
  config.validate();
  const bool logscale = support == ChainSupport::positive;

  // Log target in chain coordinates.
  auto target = [&](double x) {
    return logscale ? log_density(std::exp(x)) + x : log_density(x);
  };

  double x0;
  if (std::isnan(config.init)) {
    double lo, hi;
    expand_mode_bracket(target, 0.0, 1.0, lo, hi);
    x0 = find_mode(target, lo, hi).x;
  } else {
    x0 = logscale ? std::log(config.init) : config.init;
  }

  double x = x0;
  double hx = target(x);
  if (!std::isfinite(hx)) {
    throw InvalidInit("mh_sample: zero target density at init");
  }
  for (int i = 0; i < config.iterations; ++i) {
    const double prop = x + config.sigma * rng.normal();
    const double hp = target(prop);
    if (std::log(rng.uniform()) < hp - hx) {
      x = prop;
      hx = hp;
    }
  }
  return logscale ? std::exp(x) : x;
}

}  // namespace maxid
