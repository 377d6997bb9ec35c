#pragma once

#include <cstdint>
#include <random>

#include "mstream/rat.hpp"

namespace mstream {

/// Seedable random source with a pinned algorithm so traces replay across
/// builds and standard libraries.
///
/// Algorithm "mt19937_64/exact-v1": std::mt19937_64 seeded with the 64-bit
/// seed (the engine's output sequence is fixed by the C++ standard). Uniform
/// integers below a bound N are drawn by rejection: take ceil(bits(N)/64)
/// engine words, most significant first, mask to bits(N) bits, and retry
/// while the result is >= N. No std::*_distribution is used.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/exact-v1";

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  BigInt below(const BigInt& bound);
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mstream
