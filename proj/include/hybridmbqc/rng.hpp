#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hybridmbqc/errors.hpp"

namespace hmq::rng {

// splitmix64 mix step; used to derive independent per-run seeds from a master seed.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix(mix(master ^ mix(a + 1)) ^ mix(b + 0x51ed2701));
}

// mt19937_64 wrapper with portable samplers (no stdlib distributions, so the same
// seed draws the same outcomes on every platform).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Index sampled proportionally to the (unnormalized, nonnegative) weights.
  int sample_discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw Error(ErrorCode::numerical, "cannot sample from zero-mass weights");
    double u = uniform() * total, acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return int(i);
    }
    return int(weights.size()) - 1;
  }

  // Sum of n Bernoulli(p) draws; exact and portable.
  int sample_binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += uniform() < p ? 1 : 0;
    return k;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hmq::rng
