#include "support/refeval.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace mstream::testlib {

using dsl::Term;
using TK = Term::Kind;

namespace {

using Stream = std::function<Value(std::size_t)>;
using Env = std::map<std::string, Stream>;

Value eval(const Term& t, std::size_t time, int depth, const Env& env);

Value arith(const std::string& op, const Value& a, const Value& b) {
  if (op == "+") return Value::integer(BigInt(a.as_int() + b.as_int()));
  if (op == "-") return Value::integer(BigInt(a.as_int() - b.as_int()));
  if (op == "*") return Value::integer(BigInt(a.as_int() * b.as_int()));
  throw std::logic_error("reference evaluator: unsupported generator " + op);
}

Stream closure(const Term& t, int depth, const Env& env) {
  return [&t, depth, env](std::size_t time) { return eval(t, time, depth, env); };
}

Value eval(const Term& t, std::size_t time, int depth, const Env& env) {
  switch (t.kind) {
    case TK::Lit:
      return t.lit;
    case TK::Var:
      return env.at(t.name)(time);
    case TK::Gen:
      return arith(t.name, eval(*t.args[0], time, depth, env), eval(*t.args[1], time, depth, env));
    case TK::Fby:
      if (time == static_cast<std::size_t>(depth)) return eval(*t.args[0], time, depth, env);
      return eval(*t.args[1], time, depth + 1, env);
    case TK::Wait:
      return eval(*t.args[0], time - 1, depth - 1, env);
    case TK::Pair: {
      std::vector<Value> items;
      for (const auto& a : t.args) items.push_back(eval(*a, time, depth, env));
      return Value::tuple(std::move(items));
    }
    case TK::Copy: {
      Value v = eval(*t.args[0], time, depth, env);
      return Value::tuple({v, v});
    }
    case TK::Split: {
      Env inner = env;
      Stream whole = closure(*t.args[0], depth, env);
      for (std::size_t i = 0; i < t.binders.size(); ++i)
        inner[t.binders[i]] = [whole, i](std::size_t s) { return whole(s).as_tuple()[i]; };
      return eval(*t.args[1], time, depth, inner);
    }
    default:
      throw std::logic_error("reference evaluator: unsupported term");
  }
}

int declared_depth(const dsl::TypeExpr& e) {
  if (e.kind == dsl::TypeExpr::Kind::Delay) return 1 + declared_depth(e.items[0]);
  if (e.kind != dsl::TypeExpr::Kind::Int) throw std::logic_error("reference evaluator: only Int definitions");
  return 0;
}

}  // namespace

std::vector<Value> reference_eval(const dsl::Program& p, const std::string& name,
                                  const std::vector<std::vector<Value>>& inputs, std::size_t steps) {
  // Values computed so far, one row per definition; rows grow one step at a time.
  std::map<std::string, std::vector<Value>> done;
  Env globals;
  for (std::size_t i = 0; i < p.inputs.size(); ++i)
    globals[p.inputs[i].name] = [&inputs, i](std::size_t s) { return inputs.at(s).at(i); };
  for (const auto& d : p.defs) {
    auto* row = &done[d.name];
    globals[d.name] = [row](std::size_t s) { return row->at(s); };
  }
  for (std::size_t t = 0; t < steps; ++t) {
    for (const auto& d : p.defs) {
      auto* row = &done[d.name];
      Env env = globals;
      env[d.name] = [row](std::size_t s) { return row->at(s - 1); };
      const int depth = declared_depth(d.type);
      row->push_back(t < static_cast<std::size_t>(depth) ? Value::unit() : eval(*d.body, t, depth, env));
    }
  }
  return done.at(name);
}

// ---------------------------------------------------------------------------

namespace {

struct Binding {
  std::string name;
  int depth;  // usable at any depth >= this through waits
};

class Generator {
 public:
  explicit Generator(Rng& rng) : rng_(rng) {}

  dsl::TermPtr term(int depth, int size, std::vector<Binding>& env) {
    const std::uint64_t pick = size <= 1 ? rng_.below(2) : rng_.below(9);
    switch (pick) {
      case 0:
        return lit();
      case 1:
        return var(depth, env);
      case 2:
      case 3: {
        static const char* ops[] = {"+", "-", "*"};
        const std::string op = ops[rng_.below(3)];
        auto a = term(depth, size / 2, env);
        return dsl::Term::gen(op, {a, term(depth, size / 2, env)}, {});
      }
      case 4:
      case 5:
        if (depth < 3) {
          auto a = term(depth, size / 2, env);
          return dsl::Term::fby(a, term(depth + 1, size / 2, env), {});
        }
        return lit();
      case 6:
      case 7:
        if (depth > 0) return dsl::Term::wait(term(depth - 1, size - 1, env), {});
        return var(depth, env);
      default: {
        const std::string p = "p" + std::to_string(fresh_), q = "q" + std::to_string(fresh_);
        ++fresh_;
        dsl::TermPtr scrut;
        if (rng_.below(2) == 0) {
          scrut = dsl::Term::copy(term(depth, size / 3, env), {});
        } else {
          auto a = term(depth, size / 3, env);
          scrut = dsl::Term::pair({a, term(depth, size / 3, env)}, {});
        }
        env.push_back({p, depth});
        env.push_back({q, depth});
        auto body = term(depth, size / 2, env);
        env.resize(env.size() - 2);
        return dsl::Term::split(scrut, {p, q}, body, {});
      }
    }
  }

 private:
  dsl::TermPtr lit() { return dsl::Term::literal(Value::integer(static_cast<std::int64_t>(rng_.below(5)) - 2), {}); }

  dsl::TermPtr var(int depth, const std::vector<Binding>& env) {
    std::vector<const Binding*> ok;
    for (const auto& b : env)
      if (b.depth <= depth) ok.push_back(&b);
    if (ok.empty()) return lit();
    const Binding& b = *ok[rng_.below(ok.size())];
    dsl::TermPtr t = dsl::Term::var(b.name, {});
    for (int i = b.depth; i < depth; ++i) t = dsl::Term::wait(t, {});
    return t;
  }

  Rng& rng_;
  int fresh_ = 0;
};

dsl::TypeExpr int_type() {
  dsl::TypeExpr t;
  t.kind = dsl::TypeExpr::Kind::Int;
  return t;
}

}  // namespace

dsl::Program random_program(Rng& rng) {
  dsl::Program p;
  dsl::DomainDecl bit;
  bit.name = "Bit";
  bit.values = {Value::integer(0), Value::integer(1)};
  p.domains.push_back(bit);
  for (const char* n : {"x", "y"}) {
    dsl::InputDecl in;
    in.name = n;
    in.type.kind = dsl::TypeExpr::Kind::Named;
    in.type.name = "Bit";
    p.inputs.push_back(in);
  }
  Generator g(rng);
  std::vector<Binding> env{{"x", 0}, {"y", 0}};
  const bool helper = rng.below(2) == 0;
  if (helper) {
    std::vector<Binding> henv = env;
    henv.push_back({"h", 1});
    p.defs.push_back({"h", int_type(), g.term(0, 6, henv), {}});
    env.push_back({"h", 0});
  }
  env.push_back({"out", 1});
  // Half the time start with fby so the tail can read the previous output.
  dsl::TermPtr body = rng.below(2) == 0 ? g.term(0, 12, env)
                                        : dsl::Term::fby(g.term(0, 4, env), g.term(1, 10, env), {});
  p.defs.push_back({"out", int_type(), body, {}});
  return p;
}

dsl::TermPtr random_term(Rng& rng, const std::vector<std::string>& vars, int size) {
  Generator g(rng);
  std::vector<Binding> env;
  for (const auto& v : vars) env.push_back({v, 0});
  return g.term(0, size, env);
}

}  // namespace mstream::testlib
