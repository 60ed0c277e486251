#pragma once

#include <cstdint>
#include <random>

namespace acstab {

// Finalizer of the splitmix64 generator; good 64-bit avalanche mix.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent per-stream seed from a master seed and a stream index, so that
// grid points can be farmed out to workers in any order without changing the
// numbers each point sees.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0,1) from the top 53 bits of one mt19937_64 output.
// std::uniform_real_distribution is implementation-defined, which would break
// byte-identical reruns across toolchains; this mapping is pinned.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n).
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  return static_cast<std::size_t>(g() % n);
}

}  // namespace acstab
