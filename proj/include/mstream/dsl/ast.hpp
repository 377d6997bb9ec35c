#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mstream/error.hpp"
#include "mstream/ty.hpp"
#include "mstream/value.hpp"

namespace mstream::dsl {

struct Pos {
  int line = 1;
  int col = 1;
};

/// Error with a source position; `what()` reads "LINE:COL: message".
class DslError : public Error {
 public:
  DslError(Pos pos, const std::string& msg)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg), pos_(pos), msg_(msg) {}
  Pos pos() const { return pos_; }
  const std::string& message() const { return msg_; }

 private:
  Pos pos_;
  std::string msg_;
};

class ParseError : public DslError {
 public:
  using DslError::DslError;
};

class TypeError : public DslError {
 public:
  using DslError::DslError;
};

/// Surface type: a delay-free base leaf, a product, or a delay.
struct TypeExpr {
  enum class Kind { Int, Unit, Set, Named, Prod, Delay };
  Kind kind = Kind::Int;
  std::string name;             // Named
  std::vector<TypeExpr> items;  // Prod: the factors; Delay: one item
  Pos pos;

  bool operator==(const TypeExpr& o) const { return kind == o.kind && name == o.name && items == o.items; }
};

struct Term;
using TermPtr = std::shared_ptr<Term>;

struct Term {
  enum class Kind { Var, Lit, Gen, Pair, Split, Fby, Wait, Fbk, Copy };
  Kind kind = Kind::Var;
  Pos pos;
  std::string name;                // Var, Gen (operators are "+", "-", "*"), Fbk binder
  Value lit;                       // Lit: integer, set or unit
  std::vector<TermPtr> args;       // Gen args, Pair items, Split [scrutinee, body], Fby [head, tail], Wait/Fbk/Copy [body]
  std::vector<std::string> binders;  // Split

  // Filled in by the type checker.
  std::optional<Ty> ty;  // type of the term, delays included, domains dropped
  int depth = 0;         // Lit and Gen: how many times the constant or generator is delayed

  static TermPtr var(std::string name, Pos pos);
  static TermPtr literal(Value v, Pos pos);
  static TermPtr gen(std::string name, std::vector<TermPtr> args, Pos pos);
  static TermPtr pair(std::vector<TermPtr> items, Pos pos);
  static TermPtr split(TermPtr scrutinee, std::vector<std::string> binders, TermPtr body, Pos pos);
  static TermPtr fby(TermPtr head, TermPtr tail, Pos pos);
  static TermPtr wait(TermPtr body, Pos pos);
  static TermPtr fbk(std::string binder, TermPtr body, Pos pos);
  static TermPtr copy(TermPtr body, Pos pos);
};

/// Structural equality, positions and checker annotations ignored.
bool same_term(const Term& a, const Term& b);
TermPtr clone(const Term& t);

struct DomainDecl {
  std::string name;
  std::vector<Value> values;
  Pos pos;
};

struct InputDecl {
  std::string name;
  TypeExpr type;
  Pos pos;
};

struct Def {
  std::string name;
  TypeExpr type;
  TermPtr body;
  Pos pos;
  /// Set by desugaring: the body is `fbk m. copy(x(m))` for the self-reference m.
  bool recursive = false;
};

struct Program {
  std::vector<DomainDecl> domains;
  std::vector<InputDecl> inputs;
  std::vector<Def> defs;

  const Def* find(const std::string& name) const;
};

}  // namespace mstream::dsl
