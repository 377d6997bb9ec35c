#include "mstream/value.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "mstream/error.hpp"

namespace mstream {

Value Value::integer(std::int64_t n) { return Value(Rep(n)); }

Value Value::integer(const BigInt& n) {
  const BigInt lo = std::numeric_limits<std::int64_t>::min();
  const BigInt hi = std::numeric_limits<std::int64_t>::max();
  if (n >= lo && n <= hi) return Value(Rep(n.convert_to<std::int64_t>()));
  return Value(Rep(std::make_shared<const BigInt>(n)));
}

Value Value::set(std::vector<std::int64_t> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return Value(Rep(std::make_shared<const std::vector<std::int64_t>>(std::move(elems))));
}

Value Value::tuple(std::vector<Value> items) {
  return Value(Rep(std::make_shared<const std::vector<Value>>(std::move(items))));
}

Value::Kind Value::kind() const {
  switch (rep_.index()) {
    case 0:
      return Kind::Unit;
    case 1:
    case 2:
      return Kind::Int;
    case 3:
      return Kind::Set;
    default:
      return Kind::Tuple;
  }
}

BigInt Value::as_int() const {
  if (auto p = std::get_if<std::int64_t>(&rep_)) return BigInt(*p);
  if (auto p = std::get_if<BigRep>(&rep_)) return **p;
  throw IllTyped("expected an integer, got " + str());
}

std::optional<std::int64_t> Value::small_int() const {
  if (auto p = std::get_if<std::int64_t>(&rep_)) return *p;
  return std::nullopt;
}

std::span<const std::int64_t> Value::as_set() const {
  if (auto p = std::get_if<SetRep>(&rep_)) return **p;
  throw IllTyped("expected a set, got " + str());
}

std::span<const Value> Value::as_tuple() const {
  if (auto p = std::get_if<TupleRep>(&rep_)) return **p;
  throw IllTyped("expected a tuple, got " + str());
}

bool Value::operator==(const Value& o) const { return (*this <=> o) == 0; }

std::strong_ordering Value::operator<=>(const Value& o) const {
  // Small and big integers order together by numeric value.
  Kind a = kind();
  Kind b = o.kind();
  if (a != b) return a <=> b;
  switch (a) {
    case Kind::Unit:
      return std::strong_ordering::equal;
    case Kind::Int: {
      auto x = small_int();
      auto y = o.small_int();
      if (x && y) return *x <=> *y;
      BigInt bx = as_int();
      BigInt by = o.as_int();
      if (bx < by) return std::strong_ordering::less;
      if (bx > by) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case Kind::Set: {
      auto x = as_set();
      auto y = o.as_set();
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    }
    case Kind::Tuple: {
      auto x = as_tuple();
      auto y = o.as_tuple();
      if (x.data() == y.data() && x.size() == y.size()) return std::strong_ordering::equal;
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    }
  }
  return std::strong_ordering::equal;
}

namespace {
std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }
}  // namespace

std::size_t Value::hash() const {
  switch (kind()) {
    case Kind::Unit:
      return 0x51ed27;
    case Kind::Int:
      if (auto s = small_int()) return std::hash<std::int64_t>{}(*s);
      return std::hash<std::string>{}(as_int().str());
    case Kind::Set: {
      std::size_t h = 0x5e7;
      for (auto e : as_set()) h = mix(h, std::hash<std::int64_t>{}(e));
      return h;
    }
    case Kind::Tuple: {
      std::size_t h = 0x7a9;
      for (const auto& e : as_tuple()) h = mix(h, e.hash());
      return h;
    }
  }
  return 0;
}

std::string Value::str() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::Unit:
      os << "()";
      break;
    case Kind::Int:
      if (auto s = small_int())
        os << *s;
      else
        os << as_int().str();
      break;
    case Kind::Set: {
      os << '{';
      bool first = true;
      for (auto e : as_set()) {
        if (!first) os << ',';
        first = false;
        os << e;
      }
      os << '}';
      break;
    }
    case Kind::Tuple: {
      os << '[';
      bool first = true;
      for (const auto& e : as_tuple()) {
        if (!first) os << ',';
        first = false;
        os << e.str();
      }
      os << ']';
      break;
    }
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.str(); }

}  // namespace mstream
