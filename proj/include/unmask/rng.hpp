#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace unmask::rng {

// splitmix64 step; used to derive independent substream seeds from one
// master seed so that e.g. value sampling and selection noise never share
// a stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master;
  std::uint64_t z = splitmix64(state);
  state = z ^ (stream * 0xd1b54a32d192ed03ull + 0x2545f4914f6cdd1dull);
  return splitmix64(state);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

// Uniform double in [0, 1) with 53 random bits. Deterministic across
// platforms given the engine (unlike std::uniform_real_distribution).
inline double canonical(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1); safe as a log argument.
inline double canonical_open(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_gumbel(std::mt19937_64& g) {
  return -std::log(-std::log(canonical_open(g)));
}

// Unbiased uniform index in [0, bound) via rejection; deterministic across
// platforms given the engine.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = g();
  while (x >= limit) x = g();
  return static_cast<std::size_t>(x % bound);
}

// Inverse-CDF draw from an (already normalized) categorical distribution.
inline std::size_t sample_categorical(std::span<const double> probs, std::mt19937_64& g) {
  const double u = canonical(g);
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace unmask::rng
