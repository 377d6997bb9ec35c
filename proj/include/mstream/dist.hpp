#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mstream/function_ref.hpp"
#include "mstream/rat.hpp"
#include "mstream/rng.hpp"
#include "mstream/value.hpp"

namespace mstream {

/// Maximum support size any exact computation may build (default 1,000,000).
std::size_t support_cap();
void set_support_cap(std::size_t cap);

/// Finite-support probability distribution over values with exact weights.
/// Entries are sorted by value; every weight is positive and they sum to 1.
class Dist {
 public:
  using Entry = std::pair<Value, Rat>;

  static Dist dirac(Value v);
  /// Each distinct value gets weight multiplicity/length. Throws on empty input.
  static Dist uniform(std::span<const Value> values);
  /// Merges duplicates and drops zero weights; throws std::invalid_argument
  /// when a weight is negative or the total is not exactly 1.
  static Dist from_weights(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Weight of v (zero when outside the support).
  Rat weight(const Value& v) const;
  /// Checks the positivity and sum-to-one invariants exactly.
  bool valid() const;

  bool operator==(const Dist& o) const { return entries_ == o.entries_; }

  /// `{v1: p1, v2: p2}` with rationals as num/den.
  std::string str() const;

 private:
  friend class DistBuilder;
  std::vector<Entry> entries_;
};

std::ostream& operator<<(std::ostream& os, const Dist& d);

/// Accumulates weighted outcomes, merging equal values and enforcing the
/// support cap as entries are added.
class DistBuilder {
 public:
  explicit DistBuilder(std::size_t cap = support_cap()) : cap_(cap) {}

  void add(const Value& v, const Rat& w);
  std::size_t size() const { return acc_.size(); }
  /// Sorted, zero weights removed. Does not check the total.
  Dist build() &&;

 private:
  std::size_t cap_;
  std::unordered_map<Value, Rat, ValueHash> acc_;
};

/// Kleisli extension: weight of z is the sum over y of k(y)(z) * d(y).
Dist bind(const Dist& d, FunctionRef<Dist(const Value&)> k);

/// Pushforward along tuple projection. A single kept index yields bare
/// values; several yield tuples in the order given.
Dist marginal(const Dist& d, std::span<const std::size_t> keep);

/// Draws one support value with exact rational probabilities (see Rng).
Value sample(const Dist& d, Rng& rng);

}  // namespace mstream
