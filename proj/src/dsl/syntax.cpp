#include "mstream/dsl/syntax.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace mstream::dsl {

TermPtr Term::var(std::string name, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  t->pos = pos;
  return t;
}

TermPtr Term::literal(Value v, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Lit;
  t->lit = std::move(v);
  t->pos = pos;
  return t;
}

TermPtr Term::gen(std::string name, std::vector<TermPtr> args, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Gen;
  t->name = std::move(name);
  t->args = std::move(args);
  t->pos = pos;
  return t;
}

TermPtr Term::pair(std::vector<TermPtr> items, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Pair;
  t->args = std::move(items);
  t->pos = pos;
  return t;
}

TermPtr Term::split(TermPtr scrutinee, std::vector<std::string> binders, TermPtr body, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Split;
  t->args = {std::move(scrutinee), std::move(body)};
  t->binders = std::move(binders);
  t->pos = pos;
  return t;
}

TermPtr Term::fby(TermPtr head, TermPtr tail, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Fby;
  t->args = {std::move(head), std::move(tail)};
  t->pos = pos;
  return t;
}

TermPtr Term::wait(TermPtr body, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Wait;
  t->args = {std::move(body)};
  t->pos = pos;
  return t;
}

TermPtr Term::fbk(std::string binder, TermPtr body, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Fbk;
  t->name = std::move(binder);
  t->args = {std::move(body)};
  t->pos = pos;
  return t;
}

TermPtr Term::copy(TermPtr body, Pos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Copy;
  t->args = {std::move(body)};
  t->pos = pos;
  return t;
}

bool same_term(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || a.binders != b.binders || a.args.size() != b.args.size()) return false;
  if (a.kind == Term::Kind::Lit && !(a.lit == b.lit)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_term(*a.args[i], *b.args[i])) return false;
  return true;
}

TermPtr clone(const Term& t) {
  auto c = std::make_shared<Term>(t);
  for (auto& a : c->args) a = clone(*a);
  return c;
}

const Def* Program::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

enum class Tok { Ident, Int, Keyword, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
};

const std::set<std::string> kKeywords = {"stream", "fby", "wait", "fbk", "copy", "split", "in", "domain", "input"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  Pos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++pos.col;  // count code points, not bytes
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const Pos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({kKeywords.count(word) ? Tok::Keyword : Tok::Ident, word, start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Punct, "->", start});
      advance(2);
      continue;
    }
    if (std::string_view("()[]{},:=.+-*@").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), start});
      advance(1);
      continue;
    }
    throw ParseError(start, "unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({Tok::End, "", pos});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (!at_end()) {
      if (accept_kw("domain")) {
        DomainDecl d;
        d.pos = prev().pos;
        d.name = ident("domain name");
        expect("=");
        expect("{");
        d.values.push_back(value());
        while (accept(",")) d.values.push_back(value());
        expect("}");
        p.domains.push_back(std::move(d));
      } else if (accept_kw("input")) {
        InputDecl d;
        d.pos = prev().pos;
        d.name = ident("input name");
        expect(":");
        d.type = type();
        p.inputs.push_back(std::move(d));
      } else if (accept_kw("stream")) {
        Def d;
        d.pos = prev().pos;
        d.name = ident("stream name");
        expect(":");
        d.type = type();
        expect("=");
        d.body = term();
        p.defs.push_back(std::move(d));
      } else {
        fail("expected 'stream', 'input' or 'domain'");
      }
    }
    return p;
  }

  TermPtr single_term() {
    auto t = term();
    if (!at_end()) fail("expected end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& prev() const { return toks_[i_ - 1]; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, "syntax error at " + near + ": " + what);
  }

  bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool is_kw(const char* k) const { return peek().kind == Tok::Keyword && peek().text == k; }

  bool accept(const char* p) {
    if (!is_punct(p)) return false;
    ++i_;
    return true;
  }
  bool accept_kw(const char* k) {
    if (!is_kw(k)) return false;
    ++i_;
    return true;
  }
  void expect(const char* p) {
    if (!accept(p)) fail(std::string("expected '") + p + "'");
  }
  void expect_kw(const char* k) {
    if (!accept_kw(k)) fail(std::string("expected '") + k + "'");
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[i_++].text;
  }

  Value integer() {
    const bool neg = accept("-");
    if (peek().kind != Tok::Int) fail("expected integer");
    BigInt n(toks_[i_++].text);
    return Value::integer(neg ? BigInt(-n) : n);
  }

  std::int64_t small_integer() {
    const Pos pos = peek().pos;
    auto v = integer().small_int();
    if (!v) throw ParseError(pos, "set element out of range");
    return *v;
  }

  Value set_literal() {
    std::vector<std::int64_t> elems;
    if (!is_punct("}")) {
      elems.push_back(small_integer());
      while (accept(",")) elems.push_back(small_integer());
    }
    expect("}");
    return Value::set(std::move(elems));
  }

  Value value() {
    if (accept("{")) return set_literal();
    if (accept("[")) {
      std::vector<Value> items{value()};
      while (accept(",")) items.push_back(value());
      expect("]");
      return Value::tuple(std::move(items));
    }
    if (peek().kind == Tok::Ident && peek().text == "unit") {
      ++i_;
      return Value::unit();
    }
    return integer();
  }

  TypeExpr type() {
    TypeExpr t;
    t.pos = peek().pos;
    if (accept("@")) {
      t.kind = TypeExpr::Kind::Delay;
      t.items.push_back(type());
      return t;
    }
    if (accept("(")) {
      TypeExpr first = type();
      if (!is_punct("*")) {
        expect(")");
        return first;
      }
      t.kind = TypeExpr::Kind::Prod;
      t.items.push_back(std::move(first));
      while (accept("*")) t.items.push_back(type());
      expect(")");
      return t;
    }
    const std::string name = ident("type");
    if (name == "Int") {
      t.kind = TypeExpr::Kind::Int;
    } else if (name == "Unit") {
      t.kind = TypeExpr::Kind::Unit;
    } else if (name == "Set") {
      t.kind = TypeExpr::Kind::Set;
    } else {
      t.kind = TypeExpr::Kind::Named;
      t.name = name;
    }
    return t;
  }

  TermPtr term() {
    auto lhs = additive();
    while (is_kw("fby")) {
      const Pos pos = peek().pos;
      ++i_;
      lhs = Term::fby(lhs, additive(), pos);
    }
    return lhs;
  }

  TermPtr additive() {
    auto lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      const Token op = toks_[i_++];
      lhs = Term::gen(op.text, {lhs, multiplicative()}, op.pos);
    }
    return lhs;
  }

  TermPtr multiplicative() {
    auto lhs = atom();
    while (is_punct("*")) {
      const Token op = toks_[i_++];
      lhs = Term::gen(op.text, {lhs, atom()}, op.pos);
    }
    return lhs;
  }

  std::vector<TermPtr> term_list(const char* close) {
    std::vector<TermPtr> items;
    if (!is_punct(close)) {
      items.push_back(term());
      while (accept(",")) items.push_back(term());
    }
    expect(close);
    return items;
  }

  TermPtr atom() {
    const Pos pos = peek().pos;
    if (accept_kw("wait")) {
      expect("(");
      auto body = term();
      expect(")");
      return Term::wait(body, pos);
    }
    if (accept_kw("copy")) {
      expect("(");
      auto body = term();
      expect(")");
      return Term::copy(body, pos);
    }
    if (accept_kw("fbk")) {
      auto binder = ident("feedback variable");
      expect(".");
      return Term::fbk(binder, term(), pos);
    }
    if (accept_kw("split")) {
      auto scrutinee = term();
      expect("->");
      expect("[");
      std::vector<std::string> names{ident("variable")};
      while (accept(",")) names.push_back(ident("variable"));
      expect("]");
      expect_kw("in");
      return Term::split(scrutinee, std::move(names), term(), pos);
    }
    if (accept("[")) {
      auto items = term_list("]");
      if (items.empty()) throw ParseError(pos, "syntax error at ']': empty tuple");
      return Term::pair(std::move(items), pos);
    }
    if (accept("(")) {
      auto t = term();
      expect(")");
      return t;
    }
    if (accept("{")) return Term::literal(set_literal(), pos);
    if (peek().kind == Tok::Int || (is_punct("-") && toks_[i_ + 1].kind == Tok::Int)) return Term::literal(integer(), pos);
    if (peek().kind == Tok::Ident) {
      std::string name = toks_[i_++].text;
      if (accept("(")) return Term::gen(std::move(name), term_list(")"), pos);
      if (name == "unit") return Term::literal(Value::unit(), pos);
      return Term::var(std::move(name), pos);
    }
    fail("expected term");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// Binding strength of the printed form.
enum Prec { kOpen = 0, kFby = 1, kAdd = 2, kMul = 3, kAtom = 4 };

void print_value(std::ostream& os, const Value& v) {
  if (v.is_unit()) {
    os << "unit";
  } else if (v.is_tuple()) {
    os << '[';
    bool first = true;
    for (const auto& x : v.as_tuple()) {
      if (!first) os << ", ";
      print_value(os, x);
      first = false;
    }
    os << ']';
  } else if (v.is_set()) {
    os << '{';
    bool first = true;
    for (auto x : v.as_set()) {
      if (!first) os << ", ";
      os << x;
      first = false;
    }
    os << '}';
  } else {
    os << v.str();
  }
}

void print_term(std::ostream& os, const Term& t, int ctx) {
  auto wrap = [&](int prec, auto&& body) {
    if (ctx > prec) os << '(';
    body();
    if (ctx > prec) os << ')';
  };
  auto list = [&](const std::vector<TermPtr>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) os << ", ";
      print_term(os, *xs[i], kOpen);
    }
  };
  switch (t.kind) {
    case Term::Kind::Var:
      os << t.name;
      return;
    case Term::Kind::Lit:
      print_value(os, t.lit);
      return;
    case Term::Kind::Gen: {
      const bool infix = t.args.size() == 2 && (t.name == "+" || t.name == "-" || t.name == "*");
      if (!infix) {
        os << t.name << '(';
        list(t.args);
        os << ')';
        return;
      }
      const int prec = t.name == "*" ? kMul : kAdd;
      wrap(prec, [&] {
        print_term(os, *t.args[0], prec);
        os << ' ' << t.name << ' ';
        print_term(os, *t.args[1], prec + 1);
      });
      return;
    }
    case Term::Kind::Pair:
      os << '[';
      list(t.args);
      os << ']';
      return;
    case Term::Kind::Fby:
      wrap(kFby, [&] {
        print_term(os, *t.args[0], kFby);
        os << " fby ";
        print_term(os, *t.args[1], kAdd);
      });
      return;
    case Term::Kind::Wait:
      os << "wait(";
      print_term(os, *t.args[0], kOpen);
      os << ')';
      return;
    case Term::Kind::Copy:
      os << "copy(";
      print_term(os, *t.args[0], kOpen);
      os << ')';
      return;
    case Term::Kind::Fbk:
      // Binder bodies extend to the right as far as possible.
      wrap(kOpen, [&] {
        os << "fbk " << t.name << ". ";
        print_term(os, *t.args[0], kOpen);
      });
      return;
    case Term::Kind::Split:
      wrap(kOpen, [&] {
        os << "split ";
        print_term(os, *t.args[0], kOpen);
        os << " -> [";
        for (std::size_t i = 0; i < t.binders.size(); ++i) os << (i ? ", " : "") << t.binders[i];
        os << "] in ";
        print_term(os, *t.args[1], kOpen);
      });
      return;
  }
}

void print_type(std::ostream& os, const TypeExpr& t) {
  switch (t.kind) {
    case TypeExpr::Kind::Int:
      os << "Int";
      return;
    case TypeExpr::Kind::Unit:
      os << "Unit";
      return;
    case TypeExpr::Kind::Set:
      os << "Set";
      return;
    case TypeExpr::Kind::Named:
      os << t.name;
      return;
    case TypeExpr::Kind::Delay:
      os << '@';
      print_type(os, t.items[0]);
      return;
    case TypeExpr::Kind::Prod:
      os << '(';
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) os << " * ";
        print_type(os, t.items[i]);
      }
      os << ')';
      return;
  }
}

}  // namespace

Program parse(std::string_view source) { return Parser(source).program(); }

TermPtr parse_term(std::string_view source) { return Parser(source).single_term(); }

std::string print(const Term& t) {
  std::ostringstream os;
  print_term(os, t, kOpen);
  return os.str();
}

std::string print(const TypeExpr& t) {
  std::ostringstream os;
  print_type(os, t);
  return os.str();
}

std::string print(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.domains) {
    os << "domain " << d.name << " = {";
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      if (i) os << ", ";
      print_value(os, d.values[i]);
    }
    os << "}\n";
  }
  for (const auto& d : p.inputs) os << "input " << d.name << " : " << print(d.type) << '\n';
  for (const auto& d : p.defs) os << "stream " << d.name << " : " << print(d.type) << " = " << print(*d.body) << '\n';
  return os.str();
}

}  // namespace mstream::dsl
