#include "support/oracles.hpp"

namespace mstream::oracle {

std::map<std::int64_t, Rat> walk_position(unsigned t) {
  std::map<std::int64_t, std::int64_t> count;
  const std::uint64_t paths = std::uint64_t{1} << t;
  for (std::uint64_t mask = 0; mask < paths; ++mask) {
    std::int64_t pos = 0;
    for (unsigned i = 0; i < t; ++i) pos += (mask >> i & 1) ? 1 : -1;
    ++count[pos];
  }
  std::map<std::int64_t, Rat> out;
  for (const auto& [pos, c] : count) out[pos] = Rat(c, static_cast<std::int64_t>(paths));
  return out;
}

std::vector<std::int64_t> fibonacci(std::size_t n) {
  std::vector<std::int64_t> out;
  std::int64_t a = 0, b = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(a);
    const std::int64_t c = a + b;
    a = b;
    b = c;
  }
  return out;
}

std::map<std::int64_t, Rat> ehrenfest_size(unsigned moves) {
  constexpr int kBalls = 4;
  Rat m[kBalls + 1][kBalls + 1];
  for (int k = 0; k <= kBalls; ++k) {
    if (k > 0) m[k][k - 1] = Rat(k, kBalls);
    if (k < kBalls) m[k][k + 1] = Rat(kBalls - k, kBalls);
  }
  std::vector<Rat> row(kBalls + 1);
  row[kBalls] = Rat(1);
  for (unsigned s = 0; s < moves; ++s) {
    std::vector<Rat> next(kBalls + 1);
    for (int i = 0; i <= kBalls; ++i)
      for (int j = 0; j <= kBalls; ++j) next[j] += row[i] * m[i][j];
    row = std::move(next);
  }
  std::map<std::int64_t, Rat> out;
  for (int k = 0; k <= kBalls; ++k)
    if (!row[k].is_zero()) out[k] = row[k];
  return out;
}

}  // namespace mstream::oracle
