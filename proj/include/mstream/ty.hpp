#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mstream/value.hpp"

namespace mstream {

/// Wire type. `Delay(A)` is the one-step shift of the sequence type A: it is
/// inhabited only by unit at step 0 and behaves as A afterwards.
///
/// Base types may carry a finite-domain descriptor (an explicit inhabitant
/// list) so that exact analysis can enumerate them. Unit always has the
/// domain {()}, products enumerate the cartesian product of their parts.
class Ty {
 public:
  enum class Kind { Int, Unit, Set, Prod, Delay };

  static Ty integer();
  static Ty unit();
  static Ty set();
  static Ty prod(std::vector<Ty> items);
  static Ty delay(Ty inner);
  /// `inner` delayed `n` times.
  static Ty delay(Ty inner, int n);
  /// Base type with a named finite domain; every inhabitant listed once.
  static Ty finite(Kind base, std::string name, std::vector<Value> inhabitants);
  /// Int restricted to the given values; convenient for tests.
  static Ty ints(std::vector<std::int64_t> values, std::string name = "");

  Kind kind() const { return kind_; }
  const std::vector<Ty>& items() const { return items_; }
  const Ty& inner() const { return items_.front(); }
  const std::string& name() const { return name_; }

  /// Pushes every Delay below products: Delay(Prod[a,b]) -> Prod[Delay a, Delay b].
  Ty normalized() const;
  /// Number of leading Delay wrappers on a normalized leaf type.
  int delay_depth() const;
  /// The same type with `n` Delay wrappers stripped (n <= delay_depth()).
  Ty undelayed(int n) const;

  /// Concrete (delay-free) type of this sequence type at step t.
  Ty at(std::size_t t) const;
  /// Type of this sequence type from step 1 onwards.
  Ty tail() const;

  /// Finite inhabitant list for a delay-free type, if one is known.
  std::optional<std::vector<Value>> domain() const;
  bool has_domain() const { return domain().has_value(); }

  /// Whether `v` inhabits this delay-free type (domain membership included).
  bool admits(const Value& v) const;

  /// Structural equality, domains included.
  bool operator==(const Ty& o) const;
  /// Equality ignoring domain descriptors and names (used for wiring checks).
  bool same_shape(const Ty& o) const;

  std::string str() const;

 private:
  Ty() = default;
  Kind kind_ = Kind::Unit;
  std::vector<Ty> items_;
  std::string name_;
  std::shared_ptr<const std::vector<Value>> domain_;
};

std::ostream& operator<<(std::ostream& os, const Ty& t);

bool same_shape(const std::vector<Ty>& a, const std::vector<Ty>& b);
std::string str(const std::vector<Ty>& tys);

/// Every combination of the per-wire domains, in lexicographic order.
/// Throws MissingDomain when a wire has none.
std::vector<std::vector<Value>> enumerate_inputs(const std::vector<Ty>& tys);

}  // namespace mstream
