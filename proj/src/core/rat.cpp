#include "mstream/rat.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace mstream {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 abs128(__int128 v) { return v < 0 ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v); }

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

BigInt to_big(__int128 v) {
  bool neg = v < 0;
  u128 m = abs128(v);
  BigInt r = static_cast<std::uint64_t>(m >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(m);
  return neg ? BigInt(-r) : r;
}

}  // namespace

Rat::Rat(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  *this = from_wide(n, d);
}

Rat Rat::from_wide(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) return Rat();
  u128 g = gcd128(abs128(n), static_cast<u128>(d));
  n /= static_cast<__int128>(g);
  d /= static_cast<__int128>(g);
  if (fits64(n) && fits64(d)) {
    Rat r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  Rat r;
  r.big_ = std::make_shared<const Big>(Big{to_big(n), to_big(d)});
  return r;
}

Rat Rat::normalize(BigInt n, BigInt d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) return Rat();
  BigInt g = boost::multiprecision::gcd(n, d);
  n /= g;
  d /= g;
  const BigInt lo = std::numeric_limits<std::int64_t>::min();
  const BigInt hi = std::numeric_limits<std::int64_t>::max();
  if (n >= lo && n <= hi && d <= hi) {
    Rat r;
    r.num_ = n.convert_to<std::int64_t>();
    r.den_ = d.convert_to<std::int64_t>();
    return r;
  }
  Rat r;
  r.big_ = std::make_shared<const Big>(Big{std::move(n), std::move(d)});
  return r;
}

Rat Rat::from_big(const BigInt& n, const BigInt& d) { return normalize(n, d); }

BigInt Rat::num() const { return big_ ? big_->num : BigInt(num_); }
BigInt Rat::den() const { return big_ ? big_->den : BigInt(den_); }

int Rat::sign() const {
  if (big_) return big_->num.sign();
  return (num_ > 0) - (num_ < 0);
}

Rat Rat::operator+(const Rat& o) const {
  if (!big_ && !o.big_) {
    __int128 a, b, n, d;
    if (!__builtin_mul_overflow(static_cast<__int128>(num_), o.den_, &a) &&
        !__builtin_mul_overflow(static_cast<__int128>(o.num_), den_, &b) &&
        !__builtin_add_overflow(a, b, &n) &&
        !__builtin_mul_overflow(static_cast<__int128>(den_), o.den_, &d)) {
      return from_wide(n, d);
    }
  }
  return normalize(num() * o.den() + o.num() * den(), den() * o.den());
}

Rat Rat::operator-() const {
  if (!big_ && num_ != std::numeric_limits<std::int64_t>::min()) {
    Rat r = *this;
    r.num_ = -num_;
    return r;
  }
  return normalize(-num(), den());
}

Rat Rat::operator-(const Rat& o) const { return *this + (-o); }

Rat Rat::operator*(const Rat& o) const {
  if (!big_ && !o.big_) {
    // num_ * o.num_ and den_ * o.den_ both fit in 127 bits
    return from_wide(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  }
  return normalize(num() * o.num(), den() * o.den());
}

Rat Rat::operator/(const Rat& o) const {
  if (o.is_zero()) throw std::domain_error("division by zero rational");
  if (!big_ && !o.big_) {
    return from_wide(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  }
  return normalize(num() * o.den(), den() * o.num());
}

bool Rat::operator==(const Rat& o) const {
  if (!big_ && !o.big_) return num_ == o.num_ && den_ == o.den_;
  return num() == o.num() && den() == o.den();
}

std::strong_ordering Rat::operator<=>(const Rat& o) const {
  if (!big_ && !o.big_) {
    __int128 a = static_cast<__int128>(num_) * o.den_;
    __int128 b = static_cast<__int128>(o.num_) * den_;
    return a <=> b;
  }
  BigInt a = num() * o.den();
  BigInt b = o.num() * den();
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rat::str() const {
  if (!big_) return std::to_string(num_) + "/" + std::to_string(den_);
  return big_->num.str() + "/" + big_->den.str();
}

Rat Rat::parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return normalize(BigInt(text), BigInt(1));
    return normalize(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + text + "'");
  }
}

double Rat::to_double() const {
  if (!big_) return static_cast<double>(num_) / static_cast<double>(den_);
  return big_->num.convert_to<double>() / big_->den.convert_to<double>();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace mstream
