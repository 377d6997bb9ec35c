#include "mstream/ty.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "mstream/error.hpp"

namespace mstream {

Ty Ty::integer() {
  Ty t;
  t.kind_ = Kind::Int;
  return t;
}

Ty Ty::unit() { return Ty(); }

Ty Ty::set() {
  Ty t;
  t.kind_ = Kind::Set;
  return t;
}

Ty Ty::prod(std::vector<Ty> items) {
  Ty t;
  t.kind_ = Kind::Prod;
  t.items_ = std::move(items);
  return t;
}

Ty Ty::delay(Ty inner) {
  Ty t;
  t.kind_ = Kind::Delay;
  t.items_.push_back(std::move(inner));
  return t;
}

Ty Ty::delay(Ty inner, int n) {
  for (int i = 0; i < n; ++i) inner = delay(std::move(inner));
  return inner;
}

Ty Ty::finite(Kind base, std::string name, std::vector<Value> inhabitants) {
  if (base == Kind::Prod || base == Kind::Delay)
    throw SignatureMismatch("finite domains attach to base types only");
  Ty t;
  t.kind_ = base;
  t.name_ = std::move(name);
  std::sort(inhabitants.begin(), inhabitants.end());
  if (std::adjacent_find(inhabitants.begin(), inhabitants.end()) != inhabitants.end())
    throw SignatureMismatch("finite domain '" + t.name_ + "' lists an inhabitant twice");
  t.domain_ = std::make_shared<const std::vector<Value>>(std::move(inhabitants));
  for (const auto& v : *t.domain_) {
    Ty bare = t;
    bare.domain_.reset();
    if (!bare.admits(v))
      throw SignatureMismatch("value " + v.str() + " does not inhabit base of '" + t.name_ + "'");
  }
  return t;
}

Ty Ty::ints(std::vector<std::int64_t> values, std::string name) {
  std::vector<Value> vs;
  vs.reserve(values.size());
  for (auto v : values) vs.push_back(Value::integer(v));
  return finite(Kind::Int, std::move(name), std::move(vs));
}

Ty Ty::normalized() const {
  switch (kind_) {
    case Kind::Prod: {
      std::vector<Ty> items;
      items.reserve(items_.size());
      for (const auto& i : items_) items.push_back(i.normalized());
      Ty t = prod(std::move(items));
      return t;
    }
    case Kind::Delay: {
      Ty in = inner().normalized();
      if (in.kind_ == Kind::Prod) {
        std::vector<Ty> items;
        for (const auto& i : in.items_) items.push_back(delay(i).normalized());
        return prod(std::move(items));
      }
      return delay(std::move(in));
    }
    default:
      return *this;
  }
}

int Ty::delay_depth() const {
  int d = 0;
  const Ty* t = this;
  while (t->kind_ == Kind::Delay) {
    ++d;
    t = &t->inner();
  }
  return d;
}

Ty Ty::undelayed(int n) const {
  const Ty* t = this;
  for (int i = 0; i < n; ++i) {
    if (t->kind_ != Kind::Delay) throw SignatureMismatch("cannot strip delay from " + str());
    t = &t->inner();
  }
  return *t;
}

Ty Ty::at(std::size_t t) const {
  switch (kind_) {
    case Kind::Prod: {
      std::vector<Ty> items;
      items.reserve(items_.size());
      for (const auto& i : items_) items.push_back(i.at(t));
      return prod(std::move(items));
    }
    case Kind::Delay: {
      const Ty& in = inner();
      if (t == 0) {
        // Delay distributes over products: step 0 of Delay(A*B) is Unit*Unit.
        Ty n = in.normalized();
        if (n.kind_ == Kind::Prod) return delay(n).normalized().at(0);
        return unit();
      }
      return in.at(t - 1);
    }
    default:
      return *this;
  }
}

Ty Ty::tail() const {
  switch (kind_) {
    case Kind::Prod: {
      std::vector<Ty> items;
      for (const auto& i : items_) items.push_back(i.tail());
      return prod(std::move(items));
    }
    case Kind::Delay:
      return inner();
    default:
      return *this;
  }
}

std::optional<std::vector<Value>> Ty::domain() const {
  switch (kind_) {
    case Kind::Unit:
      return std::vector<Value>{Value::unit()};
    case Kind::Int:
    case Kind::Set:
      if (domain_) return *domain_;
      return std::nullopt;
    case Kind::Prod: {
      std::vector<std::vector<Value>> combos{{}};
      for (const auto& i : items_) {
        auto d = i.domain();
        if (!d) return std::nullopt;
        std::vector<std::vector<Value>> next;
        for (const auto& c : combos)
          for (const auto& v : *d) {
            auto n = c;
            n.push_back(v);
            next.push_back(std::move(n));
          }
        combos = std::move(next);
      }
      std::vector<Value> out;
      for (auto& c : combos) out.push_back(Value::tuple(std::move(c)));
      return out;
    }
    case Kind::Delay:
      return std::nullopt;
  }
  return std::nullopt;
}

bool Ty::admits(const Value& v) const {
  switch (kind_) {
    case Kind::Unit:
      return v.is_unit();
    case Kind::Int:
    case Kind::Set:
      if ((kind_ == Kind::Int) != v.is_int() || (kind_ == Kind::Set) != v.is_set()) return false;
      return !domain_ || std::binary_search(domain_->begin(), domain_->end(), v);
    case Kind::Prod: {
      if (!v.is_tuple()) return false;
      auto items = v.as_tuple();
      if (items.size() != items_.size()) return false;
      for (std::size_t i = 0; i < items.size(); ++i)
        if (!items_[i].admits(items[i])) return false;
      return true;
    }
    case Kind::Delay:
      return false;
  }
  return false;
}

bool Ty::operator==(const Ty& o) const {
  if (kind_ != o.kind_ || items_ != o.items_ || name_ != o.name_) return false;
  if (!domain_ || !o.domain_) return !domain_ && !o.domain_;
  return *domain_ == *o.domain_;
}

bool Ty::same_shape(const Ty& o) const {
  if (kind_ != o.kind_ || items_.size() != o.items_.size()) return false;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (!items_[i].same_shape(o.items_[i])) return false;
  return true;
}

std::string Ty::str() const {
  switch (kind_) {
    case Kind::Int:
      return name_.empty() ? "Int" : name_;
    case Kind::Unit:
      return "Unit";
    case Kind::Set:
      return name_.empty() ? "Set" : name_;
    case Kind::Delay:
      return "@" + inner().str();
    case Kind::Prod: {
      std::string s = "(";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) s += " * ";
        s += items_[i].str();
      }
      return s + ")";
    }
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Ty& t) { return os << t.str(); }

bool same_shape(const std::vector<Ty>& a, const std::vector<Ty>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same_shape(b[i])) return false;
  return true;
}

std::string str(const std::vector<Ty>& tys) {
  std::string s = "[";
  for (std::size_t i = 0; i < tys.size(); ++i) {
    if (i) s += ", ";
    s += tys[i].str();
  }
  return s + "]";
}

std::vector<std::vector<Value>> enumerate_inputs(const std::vector<Ty>& tys) {
  std::vector<std::vector<Value>> combos{{}};
  for (std::size_t w = 0; w < tys.size(); ++w) {
    auto d = tys[w].domain();
    if (!d)
      throw MissingDomain("no finite domain for wire " + std::to_string(w) + " of type " +
                          tys[w].str());
    std::vector<std::vector<Value>> next;
    next.reserve(combos.size() * d->size());
    for (const auto& c : combos)
      for (const auto& v : *d) {
        auto n = c;
        n.push_back(v);
        next.push_back(std::move(n));
      }
    combos = std::move(next);
  }
  return combos;
}

}  // namespace mstream
