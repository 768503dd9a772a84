#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rlnc {

/// Engine used for every random stream in the library.
using rng_t = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive a child seed from a parent seed and a path of stream identifiers.
/// Distinct paths give statistically independent substreams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
{
  std::uint64_t h = mix64(seed);
  for (auto id : path)
    h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
template <class URBG>
double uniform01(URBG& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability p.
template <class URBG>
bool bernoulli(URBG& rng, double p)
{
  return uniform01(rng) < p;
}

} // namespace rlnc
