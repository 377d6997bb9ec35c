#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "mstream/dsl/builtins.hpp"
#include "mstream/dsl/elaborate.hpp"
#include "mstream/dsl/syntax.hpp"
#include "mstream/trunc.hpp"
#include "support/library.hpp"
#include "support/oracles.hpp"
#include "support/refeval.hpp"

using namespace mstream;
using namespace mstream::dsl;

namespace {

std::string program_text(const std::string& file) {
  std::ifstream in(std::string(MSTREAM_PROGRAMS_DIR) + "/" + file);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Value I(std::int64_t n) { return Value::integer(n); }

std::vector<std::int64_t> ints(const std::vector<Step>& steps) {
  std::vector<std::int64_t> r;
  for (const auto& s : steps) r.push_back(*s.at(0).small_int());
  return r;
}

std::string type_error(std::string_view src) {
  try {
    compile(src);
  } catch (const TypeError& e) {
    return e.what();
  }
  return "";
}

bool same_def_body(const Program& p, const std::string& expected) {
  return same_term(*p.defs.at(0).body, *parse_term(expected));
}

const char* kShared = R"(
domain Bit = {0, 1}
input x : Bit
input y : Bit
)";

}  // namespace

TEST_SUITE("parse") {
  TEST_CASE("fibonacci") {
    auto p = parse("stream fib : Int = 0 fby (fib + (1 fby wait(fib)))");
    REQUIRE(p.defs.size() == 1);
    const Term& t = *p.defs[0].body;
    REQUIRE(t.kind == Term::Kind::Fby);
    CHECK(t.args[0]->lit == I(0));
    const Term& sum = *t.args[1];
    CHECK(sum.kind == Term::Kind::Gen);
    CHECK(sum.name == "+");
    CHECK(sum.args[0]->kind == Term::Kind::Var);
    CHECK(sum.args[1]->kind == Term::Kind::Fby);
    CHECK(sum.args[1]->args[1]->kind == Term::Kind::Wait);
  }

  TEST_CASE("walk with a negative literal argument") {
    auto p = parse("stream walk : Int = 0 fby (unif(-1,1) + walk)");
    const Term& u = *p.defs[0].body->args[1]->args[0];
    CHECK(u.name == "unif");
    CHECK(u.args[0]->lit == I(-1));
    CHECK(u.args[1]->lit == I(1));
  }

  TEST_CASE("a stray parenthesis is reported where it stands") {
    try {
      parse("stream x : Int = )");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pos().line == 1);
      CHECK(e.pos().col == 18);
      CHECK(std::string(e.what()).find("')'") != std::string::npos);
    }
  }

  TEST_CASE("columns count code points and comments run to end of line") {
    try {
      parse("-- comment with ∂ and é\nstream é");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pos().line == 2);
      CHECK(e.pos().col == 8);
    }
  }

  TEST_CASE("precedence: fby loosest, then additive, then product; left associative") {
    CHECK(same_term(*parse_term("a + b * c fby d"), *Term::fby(Term::gen("+", {Term::var("a", {}), Term::gen("*", {Term::var("b", {}), Term::var("c", {})}, {})}, {}),
                                                                Term::var("d", {}), {})));
    CHECK(same_term(*parse_term("a - b - c"), *parse_term("(a - b) - c")));
    CHECK(same_term(*parse_term("a fby b fby c"), *parse_term("(a fby b) fby c")));
    CHECK_FALSE(same_term(*parse_term("a - b - c"), *parse_term("a - (b - c)")));
  }

  TEST_CASE("types, domains and inputs") {
    auto p = parse("domain Bit = {0, 1}\ninput x : @Bit\nstream s : (Int * @Set) = [x, {}]");
    REQUIRE(p.domains.size() == 1);
    CHECK(p.domains[0].values.size() == 2);
    CHECK(p.inputs[0].type.kind == TypeExpr::Kind::Delay);
    CHECK(p.defs[0].type.kind == TypeExpr::Kind::Prod);
    CHECK(p.defs[0].body->args[1]->lit == Value::set({}));
  }

  TEST_CASE("printing a normal form gives it back") {
    for (const char* src : {
             "stream fib : Int = 0 fby fib + (1 fby wait(fib))\n",
             "stream s : (Int * Int) = split copy(uniform(4)) -> [a, b] in [a, b]\n",
             "stream f : @Int = fbk s. [wait(3), s]\n",
             "domain Bit = {0, 1}\ninput x : Bit\nstream u : Unit = discard(x * -2)\n",
         }) {
      CHECK(print(parse(src)) == src);
    }
  }

  TEST_CASE("parse after print is the identity on programs") {
    for (const char* f : {"fib.mstr", "walk.mstr", "ehrenfest.mstr", "silent.mstr"}) {
      auto p = parse(program_text(f));
      auto q = parse(print(p));
      REQUIRE(p.defs.size() == q.defs.size());
      for (std::size_t i = 0; i < p.defs.size(); ++i) CHECK(same_term(*p.defs[i].body, *q.defs[i].body));
    }
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(s);
      auto p = testlib::random_program(rng);
      auto q = parse(print(p));
      for (std::size_t i = 0; i < p.defs.size(); ++i) CHECK(same_term(*p.defs[i].body, *q.defs[i].body));
      CHECK(print(q) == print(p));
    }
  }
}

TEST_SUITE("desugar") {
  TEST_CASE("self-reference becomes feedback over a copy") {
    auto fib = desugar(parse(program_text("fib.mstr")));
    CHECK(fib.defs[0].recursive);
    CHECK(same_def_body(fib, "fbk f. copy(0 fby (f + (1 fby wait(f))))"));
    auto walk = desugar(parse(program_text("walk.mstr")));
    CHECK(same_def_body(walk, "fbk w. copy(0 fby (unif(-1,1) + w))"));
  }

  TEST_CASE("non-recursive definitions are unchanged") {
    auto p = desugar(parse("stream c : Int = 1 + 2"));
    CHECK_FALSE(p.defs[0].recursive);
    CHECK(same_def_body(p, "1 + 2"));
  }

  TEST_CASE("fresh binders avoid names already in use") {
    auto p = desugar(parse("input f : Int\nstream fib : Int = f fby (fib + wait(f))"));
    CHECK(same_def_body(p, "fbk f1. copy(f fby (f1 + wait(f)))"));
  }

  TEST_CASE("a local binder shadows the definition") {
    auto p = desugar(parse("stream s : (Int * Int) = split [1, 2] -> [s, t] in [s, t]"));
    CHECK_FALSE(p.defs[0].recursive);
  }

  TEST_CASE("wait can be routed through feedback") {
    auto p = desugar(parse("stream w : @Int = wait(5)"), WaitRoute::Feedback);
    CHECK(same_def_body(p, "fbk y. [5, y]"));
  }

  TEST_CASE("mutual recursion and forward references are rejected") {
    auto mutual = "stream a : Int = 0 fby b\nstream b : Int = 0 fby a";
    CHECK_THROWS_WITH_AS(desugar(parse(mutual)), doctest::Contains("mutual recursion"), TypeError);
    auto forward = "stream a : Int = b\nstream b : Int = 1";
    CHECK_THROWS_WITH_AS(desugar(parse(forward)), doctest::Contains("before its definition"), TypeError);
  }
}

TEST_SUITE("typecheck") {
  TEST_CASE("fibonacci checks at Int with the self-reference at @Int") {
    auto t = typecheck(desugar(parse(program_text("fib.mstr"))));
    CHECK(t.mode == Mode::Deterministic);
    CHECK(t.defs[0].type == Ty::integer());
    const Term& body = *t.program.defs[0].body;
    const Term& inner = *body.args[0]->args[0];  // 0 fby (f + (1 fby wait(f)))
    CHECK(*inner.ty == Ty::integer());
    const Term& sum = *inner.args[1];
    CHECK(*sum.ty == Ty::delay(Ty::integer()));
    CHECK(sum.depth == 1);
    CHECK(*sum.args[0]->ty == Ty::delay(Ty::integer()));
    CHECK(sum.args[1]->args[0]->depth == 1);  // the literal 1 runs from step 1
  }

  TEST_CASE("a delayed body does not fit an undelayed declaration") {
    CHECK(type_error("stream bad : Int = wait(bad)") == "1:20: delay mismatch: body has type @Int, declared Int");
    // The literal would have to start one step before step 0.
    CHECK(type_error("stream bad : Int = wait(3)") == "1:25: delay mismatch: term would need a negative delay");
  }

  TEST_CASE("fby needs a delayed second argument") {
    auto msg = type_error("input x : Int\nstream s : Int = x fby x");
    CHECK(msg.find("delay mismatch: fby's second argument has type Int, expected @Int") != std::string::npos);
    CHECK(msg.rfind("2:24", 0) == 0);
  }

  TEST_CASE("unbound, unknown and malformed generators") {
    CHECK(type_error("stream s : Int = z").find("unbound variable 'z'") != std::string::npos);
    CHECK(type_error("stream s : Int = frob(1)").find("unknown generator 'frob'") != std::string::npos);
    CHECK(type_error("stream s : Int = move(1)").find("expects 2 arguments") != std::string::npos);
    CHECK(type_error("stream s : Int = 0 fby unif(s, 1)").find("integer literal") != std::string::npos);
    CHECK(type_error("stream s : Int = unifrange(3, 1)").find("lo <= hi") != std::string::npos);
    CHECK(type_error("stream s : Int = move(1, {2})").find("type mismatch: body has type Set") != std::string::npos);
    CHECK(type_error("stream s : Int = split 3 -> [a, b] in a").find("expected a 2-tuple") != std::string::npos);
    CHECK(type_error("stream s : Foo = 1").find("unknown type 'Foo'") != std::string::npos);
  }

  TEST_CASE("the urn model checks at a pair of sets with linear use") {
    auto t = typecheck(desugar(parse(program_text("ehrenfest.mstr"))));
    CHECK(t.mode == Mode::Stochastic);
    CHECK(t.defs[0].type == Ty::prod({Ty::set(), Ty::set()}));
  }

  TEST_CASE("stochastic programs consume each variable exactly once") {
    auto twice = type_error("stream w : Int = 0 fby (unif(-1,1) + w + w)");
    CHECK(twice.find("used more than once") != std::string::npos);
    CHECK(twice.find("insert copy/split") != std::string::npos);
    auto unused = type_error("stream s : Int = split copy(unif(0,1)) -> [a, b] in a");
    CHECK(unused.find("never used") != std::string::npos);
    CHECK(unused.find("discard(b)") != std::string::npos);
    CHECK(type_error("stream s : Int = split copy(unif(0,1)) -> [a, b] in a + b").empty());
    CHECK(type_error("stream w : Int = 0 fby (unif(-1,1) + w)\nstream d : Int = w - w").find("'w' is used more") !=
          std::string::npos);
  }

  TEST_CASE("deterministic programs share variables freely") {
    CHECK(type_error("stream f : Int = 1 fby (f + f * f)").empty());
    CHECK(type_error("stream s : Int = split [1, 2] -> [a, b] in a + a").empty());
  }

  TEST_CASE("domain types keep their inhabitants on inputs") {
    auto t = typecheck(desugar(parse("domain D = {2, 5}\ninput x : D\nstream s : Int = x")));
    REQUIRE(t.inputs.size() == 1);
    CHECK(t.inputs[0].type.domain()->size() == 2);
    CHECK(surface(t.inputs[0].type) == "D");
  }
}

TEST_SUITE("builtins") {
  TEST_CASE("move toggles one ball") {
    CHECK(move_ball(3, Value::set({1, 2, 3})) == Value::set({1, 2}));
    CHECK(move_ball(4, Value::set({1, 2})) == Value::set({1, 2, 4}));
    const Kernel k = builtin_lookup("move")->make({});
    CHECK(apply_det(k, std::vector<Value>{I(2), Value::set({1, 2})}) == std::vector<Value>{Value::set({1})});
  }

  TEST_CASE("unif is two-point, unifrange and uniform are ranges") {
    const std::int64_t ab[] = {-1, 1};
    const Dist d = apply_exact(builtin_lookup("unif")->make(ab), {});
    CHECK(d.size() == 2);
    CHECK(d.weight(Value::tuple({I(-1)})) == Rat(1, 2));
    CHECK(d.weight(Value::tuple({I(0)})) == Rat(0));
    CHECK(apply_exact(builtin_lookup("unifrange")->make(ab), {}).weight(Value::tuple({I(0)})) == Rat(1, 3));
    const std::int64_t four[] = {4};
    const Dist u = apply_exact(builtin_lookup("uniform")->make(four), {});
    CHECK(u.size() == 4);
    CHECK(u.weight(Value::tuple({I(4)})) == Rat(1, 4));
  }

  TEST_CASE("integer arithmetic") {
    auto run = [](const char* op, std::int64_t a, std::int64_t b) {
      return apply_det(builtin_lookup(op)->make({}), std::vector<Value>{I(a), I(b)}).at(0);
    };
    CHECK(run("+", 2, 3) == I(5));
    CHECK(run("-", 2, 3) == I(-1));
    CHECK(run("*", -4, 3) == I(-12));
    CHECK(builtin_lookup("nope") == nullptr);
  }
}

TEST_SUITE("elaborate") {
  TEST_CASE("fibonacci runs to 34") {
    auto e = compile(program_text("fib.mstr"));
    const std::vector<std::int64_t> want{0, 1, 1, 2, 3, 5, 8, 13, 21, 34};
    CHECK(ints(causal_eval(e.at("fib"), 10)) == want);
    Rng rng(7);
    CHECK(ints(run_sample(e.at("fib"), {}, 10, rng)) == want);
  }

  TEST_CASE("a generator-only program is the lifted kernel") {
    auto e = compile("stream c : Int = unif(-1, 1)");
    CHECK(obs_equiv(e.at("c"), lift_constant(testlib::unif_kernel()), InputSpec::from_schedule(), 4).equal);
  }

  TEST_CASE("the compiled walk is causal and matches its oracle") {
    auto e = compile(program_text("walk.mstr"));
    CHECK(check_causality(e.at("walk"), InputSpec::from_schedule(), 5).passed);
    auto ms = step_marginals(e.at("walk"), History(6), 6);
    for (unsigned t = 0; t < 6; ++t) {
      std::map<std::int64_t, Rat> got;
      for (const auto& [v, p] : ms[t]) got[*v.as_tuple()[0].small_int()] = p;
      CHECK(got == oracle::walk_position(t));
    }
    CHECK(obs_equiv(e.at("walk"), testlib::walk_stream(), InputSpec::from_schedule(), 5).equal);
  }

  TEST_CASE("primitive wait and wait through feedback agree") {
    const std::string with_inputs = std::string(kShared) +
                                    "stream a : Int = x fby (wait(y) + a)\n"
                                    "stream b : @@Int = wait(wait(x * y))\n"
                                    "stream c : (Int * @Int) = [x, wait(y)]\n";
    for (const std::string& src : {program_text("fib.mstr"), program_text("walk.mstr"), program_text("ehrenfest.mstr"),
                                   program_text("silent.mstr"), with_inputs}) {
      auto prim = compile(src);
      auto fb = compile(src, {WaitRoute::Feedback});
      for (const auto& [name, s] : prim.streams) {
        CAPTURE(name);
        CHECK(obs_equiv(s, fb.at(name), InputSpec::from_schedule(), name == "urns" ? 3 : 5).equal);
      }
    }
  }

  TEST_CASE("a silent walk does nothing; a visible one does something") {
    auto e = compile(program_text("silent.mstr"));
    CHECK(obs_equiv(e.at("silent"), e.at("nothing"), InputSpec::from_schedule(), 5).equal);
    CHECK_FALSE(obs_equiv(e.at("walk"), compile("stream z : Int = 0").at("z"), InputSpec::from_schedule(), 3).equal);
  }

  TEST_CASE("urn states partition the balls and move one ball per step") {
    auto e = compile(program_text("ehrenfest.mstr"));
    Rng rng(11);
    auto out = run_sample(e.at("urns"), {}, 40, rng);
    for (std::size_t t = 0; t < out.size(); ++t) {
      auto u = out[t][0].as_tuple();
      std::vector<std::int64_t> all(u[0].as_set().begin(), u[0].as_set().end());
      all.insert(all.end(), u[1].as_set().begin(), u[1].as_set().end());
      std::sort(all.begin(), all.end());
      CHECK(all == std::vector<std::int64_t>{1, 2, 3, 4});
      if (t > 0) {
        const auto prev = out[t - 1][0].as_tuple()[0].as_set().size();
        const auto now = u[0].as_set().size();
        CHECK((now == prev + 1 || now + 1 == prev));
      }
    }
  }

  TEST_CASE("inputs reach every use through shared wires") {
    auto e = compile(std::string(kShared) + "stream s : (Int * Int) = split [x + y, x * y] -> [p, q] in [p - q, p + x]");
    History h{{I(1), I(1)}, {I(1), I(0)}, {I(0), I(0)}};
    auto out = causal_eval(e.at("s"), h);
    CHECK(out[0][0] == Value::tuple({I(1), I(3)}));
    CHECK(out[1][0] == Value::tuple({I(1), I(2)}));
    CHECK(out[2][0] == Value::tuple({I(0), I(0)}));
  }

  TEST_CASE("split elaborates as its parts composed") {
    for (std::uint64_t s = 0; s < 12; ++s) {
      Rng rng(500 + s);
      auto a = testlib::random_term(rng, {"x", "y"}, 5);
      auto b = testlib::random_term(rng, {"x", "y"}, 5);
      auto body = testlib::random_term(rng, {"p", "q"}, 6);
      const std::string whole = std::string(kShared) + "stream s : Int = split [" + print(*a) + ", " + print(*b) +
                                "] -> [p, q] in " + print(*body);
      const std::string parts = std::string(kShared) + "stream a : Int = " + print(*a) + "\nstream b : Int = " +
                                print(*b);
      const std::string inner = "input p : Int\ninput q : Int\nstream z : Int = " + print(*body);
      CAPTURE(whole);
      auto pa = compile(parts);
      const Ty bit = pa.typed.inputs[0].type;
      auto fanout = stream_wiring(TypeSchedule::constant({bit, bit}), {0, 1, 0, 1});
      auto composed = seq(seq(fanout, par(pa.at("a"), pa.at("b"))), compile(inner).at("z"));
      CHECK(obs_equiv(compile(whole).at("s"), composed, InputSpec::from_schedule(), 3).equal);
    }
  }

  TEST_CASE("random programs agree with the reference evaluator") {
    for (std::uint64_t s = 0; s < 40; ++s) {
      Rng rng(s);
      auto p = testlib::random_program(rng);
      const std::string src = print(p);
      CAPTURE(src);
      auto e = compile(src);
      History h;
      for (int t = 0; t < 8; ++t) h.push_back({I(static_cast<std::int64_t>(rng.below(2))), I(static_cast<std::int64_t>(rng.below(2)))});
      auto want = testlib::reference_eval(p, "out", h, 8);
      auto got = causal_eval(e.at("out"), h);
      REQUIRE(got.size() == 8);
      for (std::size_t t = 0; t < 8; ++t) CHECK(got[t][0] == want[t]);
    }
  }
}
