#ifndef OFFLOAD_RNG_H_
#define OFFLOAD_RNG_H_

#include <cstdint>
#include <random>

namespace offload {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream). Distinct streams keep the draws
// of one subsystem from shifting when another subsystem changes.
inline Rng MakeRng(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return Rng(mix(seed ^ mix(stream)));
}

inline double Uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int Poisson(Rng& rng, double mean) {
  if (mean <= 0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

enum Stream : std::uint64_t {
  kPlacementStream = 1,
  kFadingStream = 2,
  kSubchannelStream = 3,
  kWorkloadStream = 4,
  kScenarioStream = 5,
};

}  // namespace offload

#endif  // OFFLOAD_RNG_H_
