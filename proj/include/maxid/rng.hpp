#pragma once

#include <cmath>
#include <cstdint>

namespace maxid {

// Seeded random stream based on PCG64 (XSL-RR 128/64, "setseq" variant).
//
// A stream is addressed by (seed, stream_id).  Distinct stream ids select
// distinct sequence increments, so streams never share a state sequence;
// replicate-level fan-out uses one stream id per replicate.  All derived
// draws (uniform, exponential, normal) are implemented here rather than via
// <random> distributions so that a given (seed, stream_id) reproduces the
// same values on every standard library.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    inc_ = (static_cast<u128>(stream_id) << 1u) | 1u;
    state_ = 0u;
    step();
    state_ += static_cast<u128>(seed);
    step();
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    step();
    const std::uint64_t hi = static_cast<std::uint64_t>(state_ >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(state_);
    const unsigned rot = static_cast<unsigned>(state_ >> 122);
    const std::uint64_t x = hi ^ lo;
    return (x >> rot) | (x << ((-rot) & 63u));
  }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential, always finite and strictly positive.
  double exponential() { return -std::log(uniform()); }

  // Standard normal via Box-Muller with one cached value.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free threshold method (bounded bias < 2^-64 is irrelevant
    // for ordering shuffles; exactness of draws never routes through here).
    return static_cast<std::uint64_t>(
        (static_cast<u128>(next_u64()) * static_cast<u128>(n)) >> 64);
  }

 private:
  using u128 = unsigned __int128;

  void step() { state_ = state_ * kMultiplier() + inc_; }

  static u128 kMultiplier() {
    return (static_cast<u128>(2549297995355413924ull) << 64) |
           4865540595714422341ull;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  u128 state_;
  u128 inc_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace maxid
