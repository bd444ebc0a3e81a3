#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace condot {

// Deterministic random source. mt19937_64 has a fully specified sequence and
// the uniform/normal transforms below avoid the implementation-defined
// std::*_distribution wrappers, so streams are reproducible across toolchains.
class Rng {
public:
  explicit Rng(uint64_t seed)
      : seed_(mix(seed ^ 0x9e3779b97f4a7c15ULL)), eng_(seed_) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; no spare caching so the draw count per
  // sample is fixed, which keeps split streams independent of call patterns
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // uniform integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  // Independent child stream; deterministic in (parent seed, id).
  Rng split(uint64_t id) const {
    return Rng(mix(seed_ + 0x632be59bd9b4e019ULL * (id + 1)));
  }

private:
  static uint64_t mix(uint64_t s) {
    s ^= s >> 30;
    s *= 0xbf58476d1ce4e5b9ULL;
    s ^= s >> 27;
    s *= 0x94d049bb133111ebULL;
    s ^= s >> 31;
    return s;
  }
  uint64_t seed_;
  std::mt19937_64 eng_;
};

} // namespace condot
