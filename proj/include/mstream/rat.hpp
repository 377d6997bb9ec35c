#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mstream {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 64 bits are kept inline;
/// anything larger spills to arbitrary precision. Both representations
/// compare and print identically.
class Rat {
 public:
  Rat() = default;
  Rat(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rat(std::int64_t n, std::int64_t d);
  static Rat from_big(const BigInt& n, const BigInt& d);

  BigInt num() const;
  BigInt den() const;

  bool is_zero() const { return !big_ && num_ == 0; }
  int sign() const;

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;
  Rat operator-() const;
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }

  bool operator==(const Rat& o) const;
  std::strong_ordering operator<=>(const Rat& o) const;

  /// "num/den", e.g. "1/2", "1/1", "-3/4".
  std::string str() const;
  /// Parses "n", "n/d" (with optional sign); throws std::invalid_argument.
  static Rat parse(const std::string& text);

  double to_double() const;

 private:
  struct Big {
    BigInt num;
    BigInt den;
  };
  static Rat normalize(BigInt n, BigInt d);
  static Rat from_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const Big> big_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace mstream
