#include "mstream/dsl/builtins.hpp"

#include <algorithm>

#include "mstream/error.hpp"

namespace mstream::dsl {

namespace {

using K = Ty::Kind;

Builtin arith(std::string op, BigInt (*fn)(const BigInt&, const BigInt&)) {
  Builtin b;
  b.name = op;
  b.args = {K::Int, K::Int};
  b.make = [op, fn](std::span<const std::int64_t>) {
    return Kernel::det(op, {Ty::integer(), Ty::integer()}, {Ty::integer()}, [fn](std::span<const Value> in) {
      return std::vector<Value>{Value::integer(fn(in[0].as_int(), in[1].as_int()))};
    });
  };
  return b;
}

Kernel uniform_over(std::string name, std::vector<std::int64_t> points) {
  std::vector<Value> outs;
  for (auto p : points) outs.push_back(Value::tuple({Value::integer(p)}));
  const Dist d = Dist::uniform(outs);
  return Kernel::stoch(std::move(name), {}, {Ty::integer()}, [d](std::span<const Value>) { return d; });
}

std::vector<Builtin> make_table() {
  std::vector<Builtin> t;
  t.push_back(arith("+", [](const BigInt& a, const BigInt& b) -> BigInt { return a + b; }));
  t.push_back(arith("-", [](const BigInt& a, const BigInt& b) -> BigInt { return a - b; }));
  t.push_back(arith("*", [](const BigInt& a, const BigInt& b) -> BigInt { return a * b; }));

  Builtin move;
  move.name = "move";
  move.args = {K::Int, K::Set};
  move.result = K::Set;
  move.make = [](std::span<const std::int64_t>) {
    return Kernel::det("move", {Ty::integer(), Ty::set()}, {Ty::set()}, [](std::span<const Value> in) {
      const auto n = in[0].small_int();
      if (!n) throw IllTyped("move: ball index out of range");
      return std::vector<Value>{move_ball(*n, in[1])};
    });
  };
  t.push_back(move);

  Builtin size;
  size.name = "size";
  size.args = {K::Set};
  size.make = [](std::span<const std::int64_t>) {
    return Kernel::det("size", {Ty::set()}, {Ty::integer()}, [](std::span<const Value> in) {
      return std::vector<Value>{Value::integer(static_cast<std::int64_t>(in[0].as_set().size()))};
    });
  };
  t.push_back(size);

  Builtin unif;
  unif.name = "unif";
  unif.stochastic = true;
  unif.literal_args = 2;
  unif.validate = [](std::span<const std::int64_t>) { return std::string(); };
  unif.make = [](std::span<const std::int64_t> a) { return uniform_over("unif", {a[0], a[1]}); };
  t.push_back(unif);

  Builtin range;
  range.name = "unifrange";
  range.stochastic = true;
  range.literal_args = 2;
  range.validate = [](std::span<const std::int64_t> a) {
    if (a[0] > a[1]) return std::string("unifrange needs lo <= hi");
    if (a[1] - a[0] >= 1'000'000) return std::string("unifrange range too large");
    return std::string();
  };
  range.make = [](std::span<const std::int64_t> a) {
    std::vector<std::int64_t> pts;
    for (auto v = a[0]; v <= a[1]; ++v) pts.push_back(v);
    return uniform_over("unifrange", std::move(pts));
  };
  t.push_back(range);

  Builtin uniform;
  uniform.name = "uniform";
  uniform.stochastic = true;
  uniform.literal_args = 1;
  uniform.validate = [](std::span<const std::int64_t> a) {
    if (a[0] < 1) return std::string("uniform needs k >= 1");
    if (a[0] > 1'000'000) return std::string("uniform range too large");
    return std::string();
  };
  uniform.make = [](std::span<const std::int64_t> a) {
    std::vector<std::int64_t> pts;
    for (std::int64_t v = 1; v <= a[0]; ++v) pts.push_back(v);
    return uniform_over("uniform", std::move(pts));
  };
  t.push_back(uniform);

  Builtin discard;
  discard.name = "discard";
  discard.result = K::Unit;
  discard.polymorphic = true;
  t.push_back(discard);

  for (auto& b : t) {
    if (!b.validate) b.validate = [](std::span<const std::int64_t>) { return std::string(); };
  }
  return t;
}

}  // namespace

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> table = make_table();
  return table;
}

const Builtin* builtin_lookup(std::string_view name) {
  for (const auto& b : builtins())
    if (b.name == name) return &b;
  return nullptr;
}

Value move_ball(std::int64_t n, const Value& s) {
  std::vector<std::int64_t> elems(s.as_set().begin(), s.as_set().end());
  auto it = std::find(elems.begin(), elems.end(), n);
  if (it != elems.end())
    elems.erase(it);
  else
    elems.push_back(n);
  return Value::set(std::move(elems));
}

}  // namespace mstream::dsl
