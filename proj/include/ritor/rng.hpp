#ifndef RITOR_RNG_HPP
#define RITOR_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ritor::rng {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter), so ensembles are reproducible independent of
// thread scheduling and paths can be extended without re-drawing.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
  return splitmix64(seed ^ splitmix64(stream ^ splitmix64(ctr)));
}

// uniform in (0,1); never returns 0 or 1
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
  const std::uint64_t r = mix(seed, stream, ctr);
  return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
}

// standard normal via Box-Muller (cosine branch, one variate per counter)
inline double gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
  const double u1 = u01(seed, stream, 2 * ctr);
  const double u2 = u01(seed, stream, 2 * ctr + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// map a signed index to a counter
inline std::uint64_t zigzag(long i) {
  return i >= 0 ? 2ULL * static_cast<std::uint64_t>(i)
                : 2ULL * static_cast<std::uint64_t>(-(i + 1)) + 1ULL;
}

// per-realization seed for sample index i
inline std::uint64_t realization_seed(std::uint64_t master, std::uint64_t i) {
  return master ^ splitmix64(i);
}

}  // namespace ritor::rng

#endif
