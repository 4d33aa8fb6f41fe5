#ifndef INFODIST_RNG_HPP
#define INFODIST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace infodist {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Engine for one chunk of a sampling job. Work split into fixed-size chunks
// keyed by (seed, stream, chunk) stays reproducible no matter how chunks are
// distributed over threads; everything in this library currently runs them
// in order on one thread, which is the same sequence by construction.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t chunk) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(stream ^ splitmix64(chunk))));
}

inline constexpr long kChunkSamples = 8192;

// Uniform direction on the unit sphere in R^d.
inline std::vector<double> sphere_sample(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(static_cast<size_t>(d));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (auto& x : v) {
      x = gauss(rng);
      norm_sq += x * x;
    }
  } while (norm_sq < 1e-300);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace infodist

#endif
