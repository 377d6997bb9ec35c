#include "mstream/dist.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mstream/error.hpp"

namespace mstream {

namespace {
std::atomic<std::size_t> g_support_cap{1'000'000};
}

std::size_t support_cap() { return g_support_cap.load(std::memory_order_relaxed); }
void set_support_cap(std::size_t cap) { g_support_cap.store(cap, std::memory_order_relaxed); }

Dist Dist::dirac(Value v) {
  Dist d;
  d.entries_.emplace_back(std::move(v), Rat(1));
  return d;
}

Dist Dist::uniform(std::span<const Value> values) {
  if (values.empty()) throw std::invalid_argument("empty support");
  DistBuilder b;
  const Rat each(1, static_cast<std::int64_t>(values.size()));
  for (const auto& v : values) b.add(v, each);
  return std::move(b).build();
}

Dist Dist::from_weights(std::vector<Entry> entries) {
  DistBuilder b;
  Rat total;
  for (auto& [v, w] : entries) {
    if (w.sign() < 0) throw std::invalid_argument("negative weight " + w.str() + " on " + v.str());
    total += w;
    b.add(v, w);
  }
  if (total != Rat(1)) throw std::invalid_argument("weights sum to " + total.str() + ", not 1");
  return std::move(b).build();
}

Rat Dist::weight(const Value& v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                             [](const Entry& e, const Value& x) { return e.first < x; });
  if (it != entries_.end() && it->first == v) return it->second;
  return Rat();
}

bool Dist::valid() const {
  Rat total;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].second.sign() <= 0) return false;
    if (i > 0 && !(entries_[i - 1].first < entries_[i].first)) return false;
    total += entries_[i].second;
  }
  return !entries_.empty() && total == Rat(1);
}

std::string Dist::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ", ";
    os << entries_[i].first << ": " << entries_[i].second;
  }
  os << '}';
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Dist& d) { return os << d.str(); }

void DistBuilder::add(const Value& v, const Rat& w) {
  if (w.is_zero()) return;
  auto it = acc_.find(v);
  if (it != acc_.end()) {
    it->second += w;
    return;
  }
  if (acc_.size() >= cap_) throw SupportOverflow(cap_, acc_.size() + 1);
  acc_.emplace(v, w);
}

Dist DistBuilder::build() && {
  Dist d;
  d.entries_.reserve(acc_.size());
  for (auto& [v, w] : acc_)
    if (!w.is_zero()) d.entries_.emplace_back(v, w);
  std::sort(d.entries_.begin(), d.entries_.end(),
            [](const Dist::Entry& a, const Dist::Entry& b) { return a.first < b.first; });
  return d;
}

Dist bind(const Dist& d, FunctionRef<Dist(const Value&)> k) {
  DistBuilder b;
  for (const auto& [y, p] : d) {
    Dist ky = k(y);
    for (const auto& [z, q] : ky) b.add(z, p * q);
  }
  return std::move(b).build();
}

Dist marginal(const Dist& d, std::span<const std::size_t> keep) {
  DistBuilder b;
  for (const auto& [v, p] : d) {
    auto items = v.as_tuple();
    std::vector<Value> kept;
    kept.reserve(keep.size());
    for (auto i : keep) {
      if (i >= items.size())
        throw std::out_of_range("marginal index " + std::to_string(i) + " out of range for " +
                                v.str());
      kept.push_back(items[i]);
    }
    if (keep.size() == 1)
      b.add(kept.front(), p);
    else
      b.add(Value::tuple(std::move(kept)), p);
  }
  return std::move(b).build();
}

Value sample(const Dist& d, Rng& rng) {
  if (d.size() == 0) throw std::invalid_argument("sampling from an empty distribution");
  if (d.size() == 1) return d.entries().front().first;
  BigInt lcm = 1;
  for (const auto& [v, p] : d) lcm = boost::multiprecision::lcm(lcm, p.den());
  BigInt r = rng.below(lcm);
  BigInt acc = 0;
  for (const auto& [v, p] : d) {
    acc += p.num() * (lcm / p.den());
    if (r < acc) return v;
  }
  return d.entries().back().first;
}

}  // namespace mstream
