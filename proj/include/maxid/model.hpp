#pragma once

#include <variant>

#include "maxid/correlation.hpp"
#include "maxid/errors.hpp"
#include "maxid/magnitude.hpp"
#include "maxid/metropolis.hpp"
#include "maxid/sites.hpp"

namespace maxid {

enum class SamplerKind { ars, mh };

inline const char* sampler_name(SamplerKind s) {
  return s == SamplerKind::ars ? "ars" : "mh";
}

// Full specification of a max-id process model plus the algorithmic choices
// needed to simulate it.
struct ModelSpec {
  std::variant<ScaleMeasure, LocationMeasure> measure = ScaleMeasure{};
  CorrelationModel correlation;
  SamplerKind sampler = SamplerKind::ars;
  MhConfig mh;
  Ordering ordering = Ordering::coordinate_wise;

  Mixture mixture() const {
    return std::holds_alternative<ScaleMeasure>(measure) ? Mixture::scale
                                                         : Mixture::location;
  }

  const ScaleMeasure& scale_measure() const {
    return std::get<ScaleMeasure>(measure);
  }
  const LocationMeasure& location_measure() const {
    return std::get<LocationMeasure>(measure);
  }

  void validate() const {
    if (mixture() == Mixture::scale) {
      scale_measure().validate();
    } else {
      location_measure().validate();
      if (sampler == SamplerKind::ars) {
        throw ConfigError(
            "ARS requires a log-concave magnitude target; the location "
            "mixture must use the MH sampler");
      }
      if (correlation.magnitude_dependent()) {
        throw ConfigError(
            "magnitude-scaled correlation needs magnitudes above -1; use a "
            "magnitude-free correlation with the location mixture");
      }
    }
    correlation.validate();
    mh.validate();
  }
};

}  // namespace maxid
