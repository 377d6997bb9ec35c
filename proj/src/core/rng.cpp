#include "mstream/rng.hpp"

#include <stdexcept>

namespace mstream {

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("Rng::below needs a positive bound");
  if (bound <= BigInt(std::numeric_limits<std::uint64_t>::max()))
    return BigInt(below(bound.convert_to<std::uint64_t>()));
  const unsigned bits = boost::multiprecision::msb(BigInt(bound - 1)) + 1;
  const unsigned words = (bits + 63) / 64;
  const BigInt mask = (BigInt(1) << bits) - 1;
  for (;;) {
    BigInt r = 0;
    for (unsigned i = 0; i < words; ++i) {
      r <<= 64;
      r += next();
    }
    r &= mask;
    if (r < bound) return r;
  }
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below needs a positive bound");
  if (bound == 1) return 0;
  const std::uint64_t m = bound - 1;
  const int bits = 64 - __builtin_clzll(m);
  const std::uint64_t mask = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
  for (;;) {
    std::uint64_t r = next() & mask;
    if (r < bound) return r;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mstream
