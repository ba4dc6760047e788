#pragma once

#include <stdexcept>
#include <string>

namespace maxid {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error { using Error::Error; };

// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureError : Error { using Error::Error; };

// ARS anchors cannot be extended to an integrable envelope.
struct NonIntegrableEnvelope : Error { using Error::Error; };

// Observed derivative of the ARS target is non-monotone beyond tolerance.
// Callers are expected to fall back to Metropolis-Hastings.
struct ConcavityViolation : Error { using Error::Error; };

// MH chain started at a point of zero target density.
struct InvalidInit : Error { using Error::Error; };

// Covariance factorization failed even at the maximum allowed jitter.
struct NotPositiveDefinite : Error { using Error::Error; };

// Quantile query outside the range the marginal table can represent.
struct TabulationRangeExceeded : Error { using Error::Error; };

// Empirical joint/marginal exceedance fraction is 0 or 1.
struct DegenerateLevel : Error { using Error::Error; };

// Level loop at one site exceeded the safety cap.
struct IterationCap : Error { using Error::Error; };

// A referenced sample file does not exist or cannot be parsed.
struct MissingSamples : Error { using Error::Error; };

// Invalid run configuration.
struct ConfigError : Error { using Error::Error; };

}  // namespace maxid
