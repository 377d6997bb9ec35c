#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mstream/rat.hpp"

namespace mstream {

/// Runtime datum carried on a wire: unit, integer, finite integer set, or tuple.
///
/// Integers that fit in 64 bits are stored inline and spill to arbitrary
/// precision otherwise; the two forms are never both used for the same number,
/// so structural equality is plain variant equality. Sets and tuples share
/// their storage, which keeps copies cheap.
class Value {
 public:
  enum class Kind { Unit, Int, Set, Tuple };

  Value() = default;  // unit

  static Value unit() { return Value(); }
  static Value integer(std::int64_t n);
  static Value integer(const BigInt& n);
  /// Elements are sorted and deduplicated.
  static Value set(std::vector<std::int64_t> elems);
  static Value tuple(std::vector<Value> items);
  static Value tuple(std::initializer_list<Value> items) { return tuple(std::vector<Value>(items)); }

  Kind kind() const;
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_set() const { return kind() == Kind::Set; }
  bool is_tuple() const { return kind() == Kind::Tuple; }

  /// Throws IllTyped when the value is not an integer.
  BigInt as_int() const;
  /// The integer if it fits in 64 bits.
  std::optional<std::int64_t> small_int() const;
  std::span<const std::int64_t> as_set() const;
  std::span<const Value> as_tuple() const;

  bool operator==(const Value& o) const;
  std::strong_ordering operator<=>(const Value& o) const;

  std::size_t hash() const;
  /// Human-readable rendering: `()`, `42`, `{1,2}`, `[1,{2}]`.
  std::string str() const;

 private:
  using SetRep = std::shared_ptr<const std::vector<std::int64_t>>;
  using TupleRep = std::shared_ptr<const std::vector<Value>>;
  using BigRep = std::shared_ptr<const BigInt>;
  using Rep = std::variant<std::monostate, std::int64_t, BigRep, SetRep, TupleRep>;

  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

/// Packs a list of wire values into a tuple.
inline Value pack(std::span<const Value> items) {
  return Value::tuple(std::vector<Value>(items.begin(), items.end()));
}

}  // namespace mstream
