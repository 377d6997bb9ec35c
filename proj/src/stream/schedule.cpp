#include <algorithm>

#include "mstream/error.hpp"
#include "mstream/stream.hpp"

namespace mstream {

struct TypeSchedule::Node {
  virtual ~Node() = default;
  virtual std::size_t size() const = 0;
  virtual std::vector<Ty> at(std::size_t t) const = 0;
  virtual TypeSchedule tail() const = 0;
  virtual std::size_t horizon() const = 0;
};

namespace {

using Node = TypeSchedule::Node;

std::size_t depth(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Delay:
      return 1 + depth(t.inner());
    case Ty::Kind::Prod: {
      std::size_t d = 0;
      for (const auto& i : t.items()) d = std::max(d, depth(i));
      return d;
    }
    default:
      return 0;
  }
}

Ty unit_shape(const Ty& t) {
  if (t.kind() != Ty::Kind::Prod) return Ty::unit();
  std::vector<Ty> items;
  for (const auto& i : t.items()) items.push_back(unit_shape(i));
  return Ty::prod(std::move(items));
}

struct ConstantNode final : Node {
  std::vector<Ty> tys;
  std::size_t h = 0;
  explicit ConstantNode(std::vector<Ty> t) : tys(std::move(t)) {
    for (const auto& ty : tys) h = std::max(h, depth(ty));
  }
  std::size_t size() const override { return tys.size(); }
  std::vector<Ty> at(std::size_t t) const override {
    std::vector<Ty> r;
    r.reserve(tys.size());
    for (const auto& ty : tys) r.push_back(ty.at(t));
    return r;
  }
  TypeSchedule tail() const override {
    if (h == 0) return TypeSchedule(std::make_shared<ConstantNode>(tys));
    std::vector<Ty> r;
    for (const auto& ty : tys) r.push_back(ty.tail());
    return TypeSchedule::constant(std::move(r));
  }
  std::size_t horizon() const override { return h; }
};

struct DelayedNode final : Node {
  TypeSchedule inner;
  explicit DelayedNode(TypeSchedule i) : inner(std::move(i)) {}
  std::size_t size() const override { return inner.size(); }
  std::vector<Ty> at(std::size_t t) const override {
    if (t > 0) return inner.at(t - 1);
    std::vector<Ty> r;
    for (const auto& ty : inner.at(0)) r.push_back(unit_shape(ty));
    return r;
  }
  TypeSchedule tail() const override { return inner; }
  std::size_t horizon() const override { return inner.horizon() + 1; }
};

struct ConsNode final : Node {
  std::vector<Ty> head;
  TypeSchedule rest;
  ConsNode(std::vector<Ty> h, TypeSchedule r) : head(std::move(h)), rest(std::move(r)) {}
  std::size_t size() const override { return head.size(); }
  std::vector<Ty> at(std::size_t t) const override { return t == 0 ? head : rest.at(t - 1); }
  TypeSchedule tail() const override { return rest; }
  std::size_t horizon() const override { return rest.horizon() + 1; }
};

struct ConcatNode final : Node {
  TypeSchedule a, b;
  ConcatNode(TypeSchedule x, TypeSchedule y) : a(std::move(x)), b(std::move(y)) {}
  std::size_t size() const override { return a.size() + b.size(); }
  std::vector<Ty> at(std::size_t t) const override {
    auto r = a.at(t);
    auto s = b.at(t);
    r.insert(r.end(), s.begin(), s.end());
    return r;
  }
  TypeSchedule tail() const override { return TypeSchedule::concat(a.tail(), b.tail()); }
  std::size_t horizon() const override { return std::max(a.horizon(), b.horizon()); }
};

struct SliceNode final : Node {
  TypeSchedule s;
  std::size_t offset, count;
  SliceNode(TypeSchedule x, std::size_t o, std::size_t c) : s(std::move(x)), offset(o), count(c) {}
  std::size_t size() const override { return count; }
  std::vector<Ty> at(std::size_t t) const override {
    auto all = s.at(t);
    return std::vector<Ty>(all.begin() + static_cast<std::ptrdiff_t>(offset),
                           all.begin() + static_cast<std::ptrdiff_t>(offset + count));
  }
  TypeSchedule tail() const override { return TypeSchedule::slice(s.tail(), offset, count); }
  std::size_t horizon() const override { return s.horizon(); }
};

}  // namespace

TypeSchedule TypeSchedule::constant(std::vector<Ty> tys) {
  return TypeSchedule(std::make_shared<ConstantNode>(std::move(tys)));
}

TypeSchedule TypeSchedule::delayed(TypeSchedule inner) {
  return TypeSchedule(std::make_shared<DelayedNode>(std::move(inner)));
}

TypeSchedule TypeSchedule::cons(std::vector<Ty> head, TypeSchedule tail) {
  if (head.size() != tail.size())
    throw SignatureMismatch("schedule head has " + std::to_string(head.size()) + " wires, tail has " +
                            std::to_string(tail.size()));
  return TypeSchedule(std::make_shared<ConsNode>(std::move(head), std::move(tail)));
}

TypeSchedule TypeSchedule::concat(TypeSchedule a, TypeSchedule b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  return TypeSchedule(std::make_shared<ConcatNode>(std::move(a), std::move(b)));
}

TypeSchedule TypeSchedule::slice(TypeSchedule s, std::size_t offset, std::size_t count) {
  if (offset + count > s.size())
    throw SignatureMismatch("schedule slice [" + std::to_string(offset) + ", " +
                            std::to_string(offset + count) + ") exceeds " + std::to_string(s.size()) +
                            " wires");
  if (offset == 0 && count == s.size()) return s;
  return TypeSchedule(std::make_shared<SliceNode>(std::move(s), offset, count));
}

std::size_t TypeSchedule::size() const { return node_->size(); }
std::vector<Ty> TypeSchedule::at(std::size_t t) const { return node_->at(t); }
TypeSchedule TypeSchedule::tail() const { return node_->tail(); }
std::size_t TypeSchedule::horizon() const { return node_->horizon(); }

bool TypeSchedule::matches(const TypeSchedule& o) const {
  if (size() != o.size()) return false;
  const std::size_t h = std::max(horizon(), o.horizon());
  for (std::size_t t = 0; t <= h; ++t)
    if (!same_shape(at(t), o.at(t))) return false;
  return true;
}

std::string TypeSchedule::str() const {
  const std::size_t h = horizon();
  if (h == 0) return mstream::str(at(0));
  std::string s;
  for (std::size_t t = 0; t <= h; ++t) s += (t ? " ; " : "") + mstream::str(at(t));
  return s + " ...";
}

}  // namespace mstream
