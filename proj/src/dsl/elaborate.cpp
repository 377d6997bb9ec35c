#include "mstream/dsl/elaborate.hpp"

#include <algorithm>

#include "mstream/dsl/builtins.hpp"
#include "mstream/dsl/syntax.hpp"

namespace mstream::dsl {

namespace {

using TK = Term::Kind;

TypeSchedule sched(std::vector<Ty> tys) { return TypeSchedule::constant(std::move(tys)); }

// `t` delayed k more times; unit leaves stay unit.
Ty shift_ty(const Ty& t, int k) {
  if (t.kind() == Ty::Kind::Prod) {
    std::vector<Ty> items;
    for (const auto& i : t.items()) items.push_back(shift_ty(i, k));
    return Ty::prod(std::move(items));
  }
  if (t.kind() == Ty::Kind::Unit) return t;
  return Ty::delay(t, k);
}

// Memoryless stream applying `fn` at every step, with step-local wire types.
MStream lift_step(const std::string& name, std::vector<Ty> in, std::vector<Ty> out, Kernel::DetFn fn) {
  auto fam = KernelFamily::generator([name, in, out, fn](std::size_t t) {
    std::vector<Ty> a, b;
    for (const auto& x : in) a.push_back(x.at(t));
    for (const auto& x : out) b.push_back(x.at(t));
    return Kernel::det(name, std::move(a), std::move(b), fn);
  });
  return lift_sequence(std::move(fam), sched(in), sched(out));
}

MStream pack(std::vector<Ty> items) {
  Ty p = Ty::prod(items);
  return lift_step("pack", std::move(items), {p},
                   [](std::span<const Value> in) { return std::vector<Value>{Value::tuple(std::vector<Value>(in.begin(), in.end()))}; });
}

MStream unpack(const Ty& p) {
  return lift_step("unpack", {p}, p.items(), [](std::span<const Value> in) {
    auto items = in[0].as_tuple();
    return std::vector<Value>(items.begin(), items.end());
  });
}

// A compiled term: a stream from the wires of `vars` (binding ids, no
// repeats) to the term's single output wire.
struct Piece {
  MStream s;
  std::vector<int> vars;
};

class Elaborator {
 public:
  explicit Elaborator(const TypedProgram& p) : p_(p) {
    for (const auto& in : p.inputs) inputs_[in.name] = fresh_binding(in.type);
  }

  Elaborated run() {
    Elaborated out;
    out.typed = p_;
    std::vector<Ty> in_tys;
    for (const auto& in : p_.inputs) in_tys.push_back(in.type);
    for (const auto& d : p_.program.defs) {
      Piece core = compile(*d.body);
      cores_.emplace(d.name, core);
      std::vector<std::size_t> sources;
      for (int v : core.vars) sources.push_back(static_cast<std::size_t>(v));  // inputs are bindings 0..n-1
      out.streams.emplace(d.name, seq(stream_wiring(sched(in_tys), std::move(sources)), core.s));
    }
    return out;
  }

 private:
  int fresh_binding(const Ty& t) {
    types_.push_back(t);
    return static_cast<int>(types_.size()) - 1;
  }

  std::vector<Ty> types_of(const std::vector<int>& vars) const {
    std::vector<Ty> r;
    for (int v : vars) r.push_back(types_[static_cast<std::size_t>(v)]);
    return r;
  }

  // Wiring from `from` to `to`; duplicates and drops as needed.
  MStream rewire(const std::vector<int>& from, const std::vector<int>& to) const {
    std::vector<std::size_t> sources;
    for (int v : to)
      sources.push_back(static_cast<std::size_t>(std::find(from.begin(), from.end(), v) - from.begin()));
    return stream_wiring(sched(types_of(from)), std::move(sources));
  }

  static std::vector<int> merge(std::vector<int> a, const std::vector<int>& b) {
    for (int v : b)
      if (std::find(a.begin(), a.end(), v) == a.end()) a.push_back(v);
    return a;
  }

  // Runs the pieces side by side on their shared free variables.
  Piece gather(const std::vector<Piece>& ps) const {
    std::vector<int> all, needed;
    for (const auto& p : ps) {
      all = merge(std::move(all), p.vars);
      needed.insert(needed.end(), p.vars.begin(), p.vars.end());
    }
    MStream body = ps.front().s;
    for (std::size_t i = 1; i < ps.size(); ++i) body = par(body, ps[i].s);
    if (needed != all) body = seq(rewire(all, needed), body);
    return {body, all};
  }

  Piece then(Piece p, const MStream& g) const { return {seq(p.s, g), std::move(p.vars)}; }

  Piece identity(int binding) const { return {stream_identity(sched({types_[static_cast<std::size_t>(binding)]})), {binding}}; }

  Piece compile(const Term& t) {
    switch (t.kind) {
      case TK::Var:
        return var(t);
      case TK::Lit: {
        Ty base = t.lit.is_unit() ? Ty::unit() : t.lit.is_set() ? Ty::set() : Ty::integer();
        return {delay(lift_constant(constant(t.lit, base)), t.lit.is_unit() ? 0 : t.depth), {}};
      }
      case TK::Gen:
        return gen(t);
      case TK::Pair: {
        std::vector<Piece> ps;
        std::vector<Ty> tys;
        for (const auto& a : t.args) {
          ps.push_back(compile(*a));
          tys.push_back(*a->ty);
        }
        return then(gather(ps), pack(tys));
      }
      case TK::Split:
        return split(t);
      case TK::Fby: {
        Piece both = gather({compile(*t.args[0]), compile(*t.args[1])});
        return then(std::move(both), fby(*t.args[0]->ty));
      }
      case TK::Wait:
        return then(compile(*t.args[0]), wait(*t.args[0]->ty));
      case TK::Copy: {
        const Ty x = *t.args[0]->ty;
        return then(compile(*t.args[0]), lift_step("copy", {x}, {Ty::prod({x, x})}, [](std::span<const Value> in) {
                      return std::vector<Value>{Value::tuple({in[0], in[0]})};
                    }));
      }
      case TK::Fbk:
        return feedback_term(t);
    }
    throw Error("cannot elaborate term");
  }

  Piece var(const Term& t) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.name) return identity(it->second);
    if (auto it = inputs_.find(t.name); it != inputs_.end()) return identity(it->second);
    if (auto it = cores_.find(t.name); it != cores_.end()) return it->second;
    throw Error("unbound variable '" + t.name + "' after type checking");
  }

  Piece gen(const Term& t) {
    const Builtin& b = *builtin_lookup(t.name);
    if (b.polymorphic) {
      const Ty x = *t.args[0]->ty;
      return then(compile(*t.args[0]), lift_step("discard", {x}, {Ty::unit()}, [](std::span<const Value>) {
                    return std::vector<Value>{Value::unit()};
                  }));
    }
    if (b.literal_args) {
      std::vector<std::int64_t> lits;
      for (const auto& a : t.args) lits.push_back(*a->lit.small_int());
      return {delay(lift_constant(b.make(lits)), t.depth), {}};
    }
    auto k = delay(lift_constant(b.make({})), t.depth);
    if (t.args.empty()) return {k, {}};
    std::vector<Piece> ps;
    for (const auto& a : t.args) ps.push_back(compile(*a));
    return then(gather(ps), k);
  }

  Piece split(const Term& t) {
    Piece scrut = compile(*t.args[0]);
    const Ty& whole = *t.args[0]->ty;
    std::vector<int> binders;
    for (std::size_t i = 0; i < t.binders.size(); ++i) {
      binders.push_back(fresh_binding(whole.items()[i]));
      scope_.push_back({t.binders[i], binders.back()});
    }
    Piece body = compile(*t.args[1]);
    scope_.resize(scope_.size() - binders.size());

    std::vector<int> rest;
    for (int v : body.vars)
      if (std::find(binders.begin(), binders.end(), v) == binders.end()) rest.push_back(v);
    const std::vector<int> all = merge(scrut.vars, rest);
    std::vector<int> front = scrut.vars;
    front.insert(front.end(), rest.begin(), rest.end());
    std::vector<int> mid = binders;
    mid.insert(mid.end(), rest.begin(), rest.end());

    MStream s = par(seq(scrut.s, unpack(whole)), stream_identity(sched(types_of(rest))));
    if (front != all) s = seq(rewire(all, front), s);
    if (mid != body.vars) s = seq(s, rewire(mid, body.vars));
    return {seq(s, body.s), all};
  }

  Piece feedback_term(const Term& t) {
    const Ty& body_ty = *t.args[0]->ty;
    const int state = fresh_binding(shift_ty(body_ty.items()[0], 1));
    scope_.push_back({t.name, state});
    Piece body = compile(*t.args[0]);
    scope_.pop_back();

    std::vector<int> rest;
    for (int v : body.vars)
      if (v != state) rest.push_back(v);
    std::vector<int> front{state};
    front.insert(front.end(), rest.begin(), rest.end());
    MStream inner = seq(body.s, unpack(body_ty));
    if (front != body.vars) inner = seq(rewire(front, body.vars), inner);
    return {feedback(inner, 1), rest};
  }

  const TypedProgram& p_;
  std::vector<Ty> types_;
  std::map<std::string, int> inputs_;
  std::map<std::string, Piece> cores_;
  std::vector<std::pair<std::string, int>> scope_;
};

}  // namespace

const MStream& Elaborated::at(const std::string& name) const {
  auto it = streams.find(name);
  if (it == streams.end()) throw Error("no stream named '" + name + "'");
  return it->second;
}

Elaborated elaborate(const TypedProgram& p) { return Elaborator(p).run(); }

Elaborated compile(std::string_view source, CompileOptions opts) {
  return elaborate(typecheck(desugar(parse(source), opts.wait)));
}

}  // namespace mstream::dsl
