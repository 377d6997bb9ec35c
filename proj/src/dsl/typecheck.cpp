#include "mstream/dsl/typecheck.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "mstream/dsl/builtins.hpp"

namespace mstream::dsl {

using TK = Term::Kind;

// ---------------------------------------------------------------------------
// Desugaring

namespace {

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == TK::Var || t.kind == TK::Fbk) out.insert(t.name);
  out.insert(t.binders.begin(), t.binders.end());
  for (const auto& a : t.args) collect_names(*a, out);
}

std::string fresh(const std::string& stem, std::set<std::string>& taken) {
  std::string c = stem;
  for (int i = 1; taken.count(c); ++i) c = stem + std::to_string(i);
  taken.insert(c);
  return c;
}

// Calls `on_free` for every variable occurrence not bound inside `t`.
void free_vars(const Term& t, std::multiset<std::string>& bound, const std::function<void(const Term&)>& on_free) {
  switch (t.kind) {
    case TK::Var:
      if (!bound.count(t.name)) on_free(t);
      return;
    case TK::Split: {
      free_vars(*t.args[0], bound, on_free);
      for (const auto& b : t.binders) bound.insert(b);
      free_vars(*t.args[1], bound, on_free);
      for (const auto& b : t.binders) bound.erase(bound.find(b));
      return;
    }
    case TK::Fbk: {
      auto it = bound.insert(t.name);
      free_vars(*t.args[0], bound, on_free);
      bound.erase(it);
      return;
    }
    default:
      for (const auto& a : t.args) free_vars(*a, bound, on_free);
  }
}

void free_vars(const Term& t, const std::function<void(const Term&)>& on_free) {
  std::multiset<std::string> bound;
  free_vars(t, bound, on_free);
}

TermPtr rename_free(const Term& t, const std::string& from, const std::string& to) {
  auto r = std::make_shared<Term>(t);
  switch (t.kind) {
    case TK::Var:
      if (t.name == from) r->name = to;
      return r;
    case TK::Split:
      r->args[0] = rename_free(*t.args[0], from, to);
      if (std::find(t.binders.begin(), t.binders.end(), from) == t.binders.end())
        r->args[1] = rename_free(*t.args[1], from, to);
      return r;
    case TK::Fbk:
      if (t.name != from) r->args[0] = rename_free(*t.args[0], from, to);
      return r;
    default:
      for (auto& a : r->args) a = rename_free(*a, from, to);
      return r;
  }
}

TermPtr waits_to_feedback(const Term& t, std::set<std::string>& taken) {
  auto r = std::make_shared<Term>(t);
  for (auto& a : r->args) a = waits_to_feedback(*a, taken);
  if (t.kind != TK::Wait) return r;
  const std::string y = fresh("y", taken);
  return Term::fbk(y, Term::pair({r->args[0], Term::var(y, t.pos)}, t.pos), t.pos);
}

}  // namespace

Program desugar(const Program& p, WaitRoute route) {
  Program out = p;
  for (auto& d : out.defs) d.body = clone(*d.body);
  std::set<std::string> taken;
  std::map<std::string, std::size_t> index;
  for (const auto& d : p.domains) taken.insert(d.name);
  for (const auto& in : p.inputs) {
    if (!taken.insert(in.name).second) throw TypeError(in.pos, "duplicate name '" + in.name + "'");
  }
  for (std::size_t i = 0; i < p.defs.size(); ++i) {
    const auto& d = p.defs[i];
    if (!taken.insert(d.name).second) throw TypeError(d.pos, "duplicate definition '" + d.name + "'");
    index[d.name] = i;
  }
  for (const auto& d : p.defs) collect_names(*d.body, taken);

  // refs[i]: definitions mentioned free in body i.
  std::vector<std::vector<std::pair<std::size_t, Pos>>> refs(p.defs.size());
  for (std::size_t i = 0; i < p.defs.size(); ++i) {
    free_vars(*p.defs[i].body, [&](const Term& v) {
      auto it = index.find(v.name);
      if (it != index.end()) refs[i].push_back({it->second, v.pos});
    });
  }
  auto reaches = [&](std::size_t from, std::size_t target) {
    std::vector<bool> seen(p.defs.size());
    std::vector<std::size_t> todo{from};
    while (!todo.empty()) {
      auto n = todo.back();
      todo.pop_back();
      if (n == target) return true;
      if (seen[n]) continue;
      seen[n] = true;
      for (const auto& [m, _] : refs[n]) todo.push_back(m);
    }
    return false;
  };

  for (std::size_t i = 0; i < p.defs.size(); ++i) {
    auto& d = out.defs[i];
    bool self = false;
    for (const auto& [j, pos] : refs[i]) {
      if (j == i) {
        self = true;
      } else if (j > i) {
        const std::string& other = p.defs[j].name;
        if (reaches(j, i))
          throw TypeError(pos, "mutual recursion between '" + d.name + "' and '" + other + "' is not supported");
        throw TypeError(pos, "'" + other + "' is used before its definition");
      }
    }
    if (route == WaitRoute::Feedback) d.body = waits_to_feedback(*d.body, taken);
    if (self) {
      std::string stem(1, static_cast<char>(std::tolower(static_cast<unsigned char>(d.name[0]))));
      if (!std::isalpha(static_cast<unsigned char>(stem[0]))) stem = "m";
      const std::string m = fresh(stem, taken);
      const Pos pos = d.body->pos;
      d.body = Term::fbk(m, Term::copy(rename_free(*d.body, d.name, m), pos), pos);
      d.recursive = true;
    }
  }
  return out;
}

Mode infer_mode(const Program& p) {
  std::function<bool(const Term&)> stochastic = [&](const Term& t) {
    if (t.kind == TK::Gen) {
      const Builtin* b = builtin_lookup(t.name);
      if (b && b->stochastic) return true;
    }
    return std::any_of(t.args.begin(), t.args.end(), [&](const TermPtr& a) { return stochastic(*a); });
  };
  for (const auto& d : p.defs)
    if (stochastic(*d.body)) return Mode::Stochastic;
  return Mode::Deterministic;
}

const TypedDef* TypedProgram::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

std::string surface(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Int:
      return t.name().empty() ? "Int" : t.name();
    case Ty::Kind::Unit:
      return t.name().empty() ? "Unit" : t.name();
    case Ty::Kind::Set:
      return t.name().empty() ? "Set" : t.name();
    case Ty::Kind::Delay:
      return "@" + surface(t.inner());
    case Ty::Kind::Prod: {
      std::string s = "(";
      for (std::size_t i = 0; i < t.items().size(); ++i) s += (i ? " * " : "") + surface(t.items()[i]);
      return s + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Inference

namespace {

// Inference-time type. A leaf's delay is dvar + off; a meta stands for a
// whole type delayed `shift` times.
struct Shape;
using SP = std::shared_ptr<const Shape>;
struct Shape {
  enum class K { Meta, Leaf, Prod };
  K k = K::Leaf;
  int id = 0, shift = 0;
  Ty::Kind base = Ty::Kind::Unit;
  int dvar = 0, off = 0;
  std::vector<SP> items;
};

SP meta(int id, int shift) {
  auto s = std::make_shared<Shape>();
  s->k = Shape::K::Meta;
  s->id = id;
  s->shift = shift;
  return s;
}

SP leaf(Ty::Kind base, int dvar, int off) {
  auto s = std::make_shared<Shape>();
  s->base = base;
  s->dvar = dvar;
  s->off = off;
  return s;
}

SP unit_leaf() { return leaf(Ty::Kind::Unit, 0, 0); }

SP prod(std::vector<SP> items) {
  auto s = std::make_shared<Shape>();
  s->k = Shape::K::Prod;
  s->items = std::move(items);
  return s;
}

struct Mismatch {
  bool delay;
};

constexpr int kAnchor = 0;  // delay variable pinned to 0

class Solver {
 public:
  Solver() { new_dvar(); }

  int new_meta() {
    subst_.push_back(nullptr);
    return static_cast<int>(subst_.size()) - 1;
  }

  int new_dvar() {
    parent_.push_back(static_cast<int>(parent_.size()));
    delta_.push_back(0);
    return static_cast<int>(parent_.size()) - 1;
  }

  // Root of v's class and value(v) - value(root).
  std::pair<int, int> find(int v) {
    if (parent_[v] == v) return {v, 0};
    auto [r, d] = find(parent_[v]);
    parent_[v] = r;
    delta_[v] += d;
    return {r, delta_[v]};
  }

  // Enforces value(a) + oa == value(b) + ob.
  bool join(int a, int oa, int b, int ob) {
    auto [ra, da] = find(a);
    auto [rb, db] = find(b);
    if (ra == rb) return da + oa == db + ob;
    parent_[ra] = rb;
    delta_[ra] = db + ob - da - oa;
    return true;
  }

  bool anchored(int root) { return find(kAnchor).first == root; }

  SP resolve(SP s) {
    while (s->k == Shape::K::Meta && subst_[s->id]) s = shift(subst_[s->id], s->shift);
    return s;
  }

  SP shift(SP s, int k) {
    if (k == 0) return s;
    s = resolve(s);
    switch (s->k) {
      case Shape::K::Meta:
        return meta(s->id, s->shift + k);
      case Shape::K::Leaf:
        return leaf(s->base, s->dvar, s->off + k);
      case Shape::K::Prod: {
        std::vector<SP> items;
        for (const auto& i : s->items) items.push_back(shift(i, k));
        return prod(std::move(items));
      }
    }
    return s;
  }

  bool occurs(int id, SP s) {
    s = resolve(s);
    if (s->k == Shape::K::Meta) return s->id == id;
    return std::any_of(s->items.begin(), s->items.end(), [&](const SP& i) { return occurs(id, i); });
  }

  void unify(SP a, SP b) {
    a = resolve(a);
    b = resolve(b);
    if (a->k == Shape::K::Meta && b->k == Shape::K::Meta && a->id == b->id) {
      if (a->shift != b->shift) throw Mismatch{true};
      return;
    }
    if (a->k == Shape::K::Meta) return bind(a, b);
    if (b->k == Shape::K::Meta) return bind(b, a);
    if (a->k != b->k) throw Mismatch{false};
    if (a->k == Shape::K::Prod) {
      if (a->items.size() != b->items.size()) throw Mismatch{false};
      for (std::size_t i = 0; i < a->items.size(); ++i) unify(a->items[i], b->items[i]);
      return;
    }
    if (a->base != b->base) throw Mismatch{false};
    if (a->base == Ty::Kind::Unit) return;
    if (!join(a->dvar, a->off, b->dvar, b->off)) throw Mismatch{true};
  }

  // Leaf depths under the minimal solution of the classes in `mins`.
  int depth(int dvar, int off, const std::map<int, int>& mins) {
    auto [r, d] = find(dvar);
    if (anchored(r)) return d + off - find(kAnchor).second;
    auto it = mins.find(r);
    return d + off - (it == mins.end() ? d + off : it->second);
  }

  void note_min(int dvar, int off, std::map<int, int>& mins) {
    auto [r, d] = find(dvar);
    if (anchored(r)) return;
    auto [it, fresh] = mins.emplace(r, d + off);
    if (!fresh) it->second = std::min(it->second, d + off);
  }

  void note_leaves(SP s, std::map<int, int>& mins) {
    s = resolve(s);
    if (s->k == Shape::K::Leaf && s->base != Ty::Kind::Unit) note_min(s->dvar, s->off, mins);
    for (const auto& i : s->items) note_leaves(i, mins);
  }

  // Unresolved metas are Unit; nullopt when some leaf would need a negative delay.
  std::optional<Ty> to_ty(SP s, const std::map<int, int>& mins) {
    s = resolve(s);
    switch (s->k) {
      case Shape::K::Meta:
        return Ty::unit();
      case Shape::K::Prod: {
        std::vector<Ty> items;
        for (const auto& i : s->items) {
          auto t = to_ty(i, mins);
          if (!t) return std::nullopt;
          items.push_back(*t);
        }
        return Ty::prod(std::move(items));
      }
      case Shape::K::Leaf: {
        if (s->base == Ty::Kind::Unit) return Ty::unit();
        const int d = depth(s->dvar, s->off, mins);
        if (d < 0) return std::nullopt;
        return Ty::delay(s->base == Ty::Kind::Int ? Ty::integer() : Ty::set(), d);
      }
    }
    return std::nullopt;
  }

  std::string render(SP s, const std::map<int, int>& mins) {
    s = resolve(s);
    switch (s->k) {
      case Shape::K::Meta:
        return "_";
      case Shape::K::Prod: {
        std::string r = "(";
        for (std::size_t i = 0; i < s->items.size(); ++i) r += (i ? " * " : "") + render(s->items[i], mins);
        return r + ")";
      }
      case Shape::K::Leaf: {
        if (s->base == Ty::Kind::Unit) return "Unit";
        const int d = depth(s->dvar, s->off, mins);
        std::string r = d < 0 ? "@^" + std::to_string(d) + " " : std::string(static_cast<std::size_t>(d), '@');
        return r + (s->base == Ty::Kind::Int ? "Int" : "Set");
      }
    }
    return "?";
  }

  // Renders two shapes side by side with one shared delay normalization.
  std::pair<std::string, std::string> render_pair(SP a, SP b) {
    std::map<int, int> mins;
    note_leaves(a, mins);
    note_leaves(b, mins);
    return {render(a, mins), render(b, mins)};
  }

  SP from_ty(const Ty& t) {
    const Ty n = t.normalized();
    if (n.kind() == Ty::Kind::Prod) {
      std::vector<SP> items;
      for (const auto& i : n.items()) items.push_back(from_ty(i));
      return prod(std::move(items));
    }
    const int d = n.delay_depth();
    const Ty b = n.undelayed(d);
    if (b.kind() == Ty::Kind::Prod) return shift(from_ty(b), d);
    if (b.kind() == Ty::Kind::Unit) return unit_leaf();
    return leaf(b.kind(), kAnchor, d);
  }

 private:
  void bind(SP m, SP other) {
    if (occurs(m->id, other)) throw Mismatch{false};
    subst_[m->id] = shift(other, -m->shift);
  }

  std::vector<SP> subst_;
  std::vector<int> parent_, delta_;
};

// Strips finite-domain descriptors; keeps delays.
Ty drop_domains(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Int:
      return Ty::integer();
    case Ty::Kind::Set:
      return Ty::set();
    case Ty::Kind::Unit:
      return Ty::unit();
    case Ty::Kind::Delay:
      return Ty::delay(drop_domains(t.inner()));
    case Ty::Kind::Prod: {
      std::vector<Ty> items;
      for (const auto& i : t.items()) items.push_back(drop_domains(i));
      return Ty::prod(std::move(items));
    }
  }
  return t;
}

struct Globals {
  std::map<std::string, Ty> domains;  // named finite types
  std::map<std::string, Ty> inputs;   // domains kept
  std::map<std::string, Ty> defs;     // checked so far
};

Ty resolve_type(const TypeExpr& e, const Globals& g) {
  switch (e.kind) {
    case TypeExpr::Kind::Int:
      return Ty::integer();
    case TypeExpr::Kind::Unit:
      return Ty::unit();
    case TypeExpr::Kind::Set:
      return Ty::set();
    case TypeExpr::Kind::Named: {
      auto it = g.domains.find(e.name);
      if (it == g.domains.end()) throw TypeError(e.pos, "unknown type '" + e.name + "'");
      return it->second;
    }
    case TypeExpr::Kind::Delay:
      return Ty::delay(resolve_type(e.items[0], g));
    case TypeExpr::Kind::Prod: {
      std::vector<Ty> items;
      for (const auto& i : e.items) items.push_back(resolve_type(i, g));
      return Ty::prod(std::move(items));
    }
  }
  throw TypeError(e.pos, "bad type");
}

Ty domain_type(const DomainDecl& d) {
  const bool ints = std::all_of(d.values.begin(), d.values.end(), [](const Value& v) { return v.is_int(); });
  const bool sets = std::all_of(d.values.begin(), d.values.end(), [](const Value& v) { return v.is_set(); });
  if (!ints && !sets) throw TypeError(d.pos, "domain '" + d.name + "' must list only integers or only sets");
  std::set<Value> seen;
  for (const auto& v : d.values)
    if (!seen.insert(v).second) throw TypeError(d.pos, "domain '" + d.name + "' lists " + v.str() + " twice");
  return Ty::finite(ints ? Ty::Kind::Int : Ty::Kind::Set, d.name, d.values);
}

std::string describe(bool delay) { return delay ? "delay mismatch: " : "type mismatch: "; }

class Checker {
 public:
  explicit Checker(const Globals& g) : g_(g) {}

  SP infer(Term& t) {
    SP r = infer_inner(t);
    annots_.push_back({&t, r});
    return r;
  }

  void bind(const std::string& name, SP s) { scope_.push_back({name, std::move(s)}); }
  void unbind(std::size_t n = 1) { scope_.resize(scope_.size() - n); }

  Solver& solver() { return s_; }

  // Writes `ty` and `depth` into every visited term.
  void finalize() {
    std::map<int, int> mins;
    for (const auto& [t, sp] : annots_) s_.note_leaves(sp, mins);
    for (const auto& [t, d] : depths_) s_.note_min(d, 0, mins);
    for (const auto& [t, sp] : annots_) {
      auto ty = s_.to_ty(sp, mins);
      if (!ty) throw TypeError(t->pos, "delay mismatch: term would need a negative delay");
      t->ty = *ty;
    }
    for (const auto& [t, d] : depths_) t->depth = s_.depth(d, 0, mins);
  }

  void annotate(Term& t, SP s) { annots_.push_back({&t, std::move(s)}); }

 private:
  SP lookup(const Term& t) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.name) return it->second;
    if (auto it = g_.inputs.find(t.name); it != g_.inputs.end()) return s_.from_ty(it->second);
    if (auto it = g_.defs.find(t.name); it != g_.defs.end()) return s_.from_ty(it->second);
    throw TypeError(t.pos, "unbound variable '" + t.name + "'");
  }

  void unify_or(SP got, SP want, const Term& at, const std::string& what) {
    try {
      s_.unify(got, want);
    } catch (const Mismatch& m) {
      auto [g, w] = s_.render_pair(got, want);
      throw TypeError(at.pos, describe(m.delay) + what + " has type " + g + ", expected " + w);
    }
  }

  SP infer_inner(Term& t) {
    switch (t.kind) {
      case TK::Var:
        return lookup(t);
      case TK::Lit: {
        if (t.lit.is_unit()) return unit_leaf();
        const int d = s_.new_dvar();
        depths_.push_back({&t, d});
        return leaf(t.lit.is_set() ? Ty::Kind::Set : Ty::Kind::Int, d, 0);
      }
      case TK::Gen:
        return infer_gen(t);
      case TK::Pair: {
        std::vector<SP> items;
        for (auto& a : t.args) items.push_back(infer(*a));
        return prod(std::move(items));
      }
      case TK::Split: {
        std::set<std::string> distinct(t.binders.begin(), t.binders.end());
        if (distinct.size() != t.binders.size()) throw TypeError(t.pos, "split binders must be distinct");
        SP scrut = infer(*t.args[0]);
        std::vector<SP> parts;
        for (std::size_t i = 0; i < t.binders.size(); ++i) parts.push_back(meta(s_.new_meta(), 0));
        try {
          s_.unify(scrut, prod(parts));
        } catch (const Mismatch&) {
          std::map<int, int> mins;
          s_.note_leaves(scrut, mins);
          throw TypeError(t.args[0]->pos, "type mismatch: split scrutinee has type " + s_.render(scrut, mins) +
                                              ", expected a " + std::to_string(t.binders.size()) + "-tuple");
        }
        for (std::size_t i = 0; i < t.binders.size(); ++i) bind(t.binders[i], s_.resolve(parts[i]));
        SP body = infer(*t.args[1]);
        unbind(t.binders.size());
        return body;
      }
      case TK::Fby: {
        SP head = infer(*t.args[0]);
        SP tail = infer(*t.args[1]);
        unify_or(tail, s_.shift(head, 1), *t.args[1], "fby's second argument");
        return head;
      }
      case TK::Wait:
        return s_.shift(infer(*t.args[0]), 1);
      case TK::Copy: {
        SP x = infer(*t.args[0]);
        return prod({x, x});
      }
      case TK::Fbk: {
        const int m = s_.new_meta();
        const int a = s_.new_meta();
        bind(t.name, meta(m, 1));
        SP body = infer(*t.args[0]);
        unbind();
        unify_or(body, prod({meta(m, 0), meta(a, 0)}), *t.args[0], "fbk body");
        return meta(a, 0);
      }
    }
    throw TypeError(t.pos, "unsupported term");
  }

  SP infer_gen(Term& t) {
    const Builtin* b = builtin_lookup(t.name);
    if (!b) throw TypeError(t.pos, "unknown generator '" + t.name + "'");
    const std::size_t arity = b->polymorphic ? 1 : b->literal_args ? b->literal_args : b->args.size();
    if (t.args.size() != arity)
      throw TypeError(t.pos, "'" + t.name + "' expects " + std::to_string(arity) + " argument" +
                                 (arity == 1 ? "" : "s") + ", got " + std::to_string(t.args.size()));
    if (b->polymorphic) {
      infer(*t.args[0]);
      return unit_leaf();
    }
    const int d = s_.new_dvar();
    depths_.push_back({&t, d});
    if (b->literal_args) {
      std::vector<std::int64_t> lits;
      for (auto& a : t.args) {
        auto n = a->kind == TK::Lit ? a->lit.small_int() : std::nullopt;
        if (!n) throw TypeError(a->pos, "'" + t.name + "' expects integer literal arguments");
        lits.push_back(*n);
        a->ty = Ty::integer();
      }
      if (auto msg = b->validate(lits); !msg.empty()) throw TypeError(t.pos, msg);
      return leaf(b->result, d, 0);
    }
    for (std::size_t i = 0; i < arity; ++i) {
      SP got = infer(*t.args[i]);
      const std::string what = b->name.size() == 1 ? "operand " + std::to_string(i + 1) + " of '" + b->name + "'"
                                                   : "argument " + std::to_string(i + 1) + " of '" + b->name + "'";
      unify_or(got, leaf(b->args[i], d, 0), *t.args[i], what);
    }
    return leaf(b->result, d, 0);
  }

  const Globals& g_;
  Solver s_;
  std::vector<std::pair<std::string, SP>> scope_;
  std::vector<std::pair<Term*, SP>> annots_;
  std::vector<std::pair<Term*, int>> depths_;
};

// Checks one definition against its declared type and annotates its terms.
void check_def(Def& d, const Ty& declared, const Globals& g) {
  Checker c(g);
  SP want = c.solver().from_ty(declared);
  if (!d.recursive) {
    SP got = c.infer(*d.body);
    try {
      c.solver().unify(got, want);
    } catch (const Mismatch& m) {
      auto [gs, ws] = c.solver().render_pair(got, want);
      throw TypeError(d.body->pos, describe(m.delay) + "body has type " + gs + ", declared " + ws);
    }
    c.finalize();
    return;
  }
  Term& fbk = *d.body;
  Term& cp = *fbk.args[0];
  Term& inner = *cp.args[0];
  c.bind(fbk.name, c.solver().shift(want, 1));
  SP got = c.infer(inner);
  c.unbind();
  try {
    c.solver().unify(got, want);
  } catch (const Mismatch& m) {
    // Reported as the body reads in the source: the self-reference at its declared type.
    std::string gs;
    try {
      Checker plain(g);
      SP w = plain.solver().from_ty(declared);
      plain.bind(fbk.name, w);
      gs = plain.solver().render_pair(plain.infer(inner), w).first;
    } catch (const Error&) {
      gs = c.solver().render_pair(got, want).first;
    }
    throw TypeError(inner.pos, describe(m.delay) + "body has type " + gs + ", declared " + surface(declared));
  }
  c.annotate(cp, prod({want, want}));
  c.annotate(fbk, want);
  c.finalize();
}

// Stochastic programs: binders are used exactly once, globals at most once.
class Linearity {
 public:
  void def(const Term& body) {
    globals_.clear();
    walk(body);
  }

 private:
  struct Binding {
    std::string name;
    Pos pos;
    int uses = 0;
  };

  void use(const Term& v, int& count) {
    if (++count > 1)
      throw TypeError(v.pos, "variable '" + v.name + "' is used more than once in a stochastic program; insert copy/split");
  }

  void close(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const Binding& b = scope_.back();
      if (b.uses == 0)
        throw TypeError(b.pos, "variable '" + b.name +
                                   "' is never used in a stochastic program; consume it with discard(" + b.name + ")");
      scope_.pop_back();
    }
  }

  void walk(const Term& t) {
    switch (t.kind) {
      case TK::Var: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
          if (it->name == t.name) return use(t, it->uses);
        return use(t, globals_[t.name]);
      }
      case TK::Split:
        walk(*t.args[0]);
        for (const auto& b : t.binders) scope_.push_back({b, t.pos});
        walk(*t.args[1]);
        return close(t.binders.size());
      case TK::Fbk:
        scope_.push_back({t.name, t.pos});
        walk(*t.args[0]);
        return close(1);
      default:
        for (const auto& a : t.args) walk(*a);
    }
  }

  std::vector<Binding> scope_;
  std::map<std::string, int> globals_;
};

}  // namespace

TypedProgram typecheck(Program p) {
  TypedProgram out;
  Globals g;
  for (const auto& d : p.domains) {
    if (g.domains.count(d.name)) throw TypeError(d.pos, "duplicate domain '" + d.name + "'");
    g.domains.emplace(d.name, domain_type(d));
  }
  for (const auto& in : p.inputs) {
    Ty t = resolve_type(in.type, g);
    g.inputs.emplace(in.name, t);
    out.inputs.push_back({in.name, t});
  }
  out.mode = infer_mode(p);
  Linearity lin;
  for (auto& d : p.defs) {
    const Ty declared = drop_domains(resolve_type(d.type, g));
    check_def(d, declared, g);
    if (out.mode == Mode::Stochastic) lin.def(*d.body);
    g.defs.emplace(d.name, declared);
    out.defs.push_back({d.name, declared});
  }
  out.program = std::move(p);
  return out;
}

}  // namespace mstream::dsl
