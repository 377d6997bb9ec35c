// Acceptance runner: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mstream/cli.hpp"
#include "mstream/dsl/elaborate.hpp"
#include "mstream/dsl/syntax.hpp"
#include "mstream/laws.hpp"
#include "mstream/trunc.hpp"
#include "support/library.hpp"
#include "support/oracles.hpp"
#include "support/refeval.hpp"

using namespace mstream;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
};

std::string program_text(const std::string& file) {
  std::ifstream in(std::string(MSTREAM_PROGRAMS_DIR) + "/" + file);
  if (!in) throw std::runtime_error("cannot read " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Value I(std::int64_t n) { return Value::integer(n); }

std::int64_t small(const Value& v) { return *v.small_int(); }

// Failures stop the criterion at the first counterexample.
#define EXPECT(cond, msg)                 \
  do {                                    \
    if (!(cond)) return Outcome{false, msg}; \
  } while (0)

Outcome ac1_fibonacci() {
  auto e = dsl::compile(program_text("fib.mstr"));
  Rng rng(0);
  auto out = run_sample(e.at("fib"), {}, 10, rng);
  const auto want = oracle::fibonacci(10);
  EXPECT(out.size() == 10, "wrong number of steps");
  std::string got;
  for (std::size_t t = 0; t < 10; ++t) {
    got += (t ? "," : "") + out[t][0].str();
    EXPECT(out[t][0] == I(want[t]), "got [" + got + "]");
  }
  return {true, "[" + got + "]"};
}

Outcome ac2_walk_distribution() {
  const std::string file = std::string(MSTREAM_PROGRAMS_DIR) + "/walk.mstr";
  const char* argv[] = {"mstream", "dist", file.c_str(), "walk", "--steps", "4"};
  std::ostringstream out, err;
  EXPECT(cli::run(6, argv, out, err) == 0, "dist failed: " + err.str());
  std::istringstream lines(out.str());
  std::size_t t = 0;
  for (std::string line; std::getline(lines, line); ++t) {
    const auto rec = json::parse(line);
    EXPECT(rec["t"] == t, "records out of order");
    std::map<std::int64_t, Rat> got;
    for (const auto& e : rec["dist"]) got[e["value"][0].get<std::int64_t>()] = Rat::parse(e["p"].get<std::string>());
    EXPECT(got == oracle::walk_position(static_cast<unsigned>(t)), "marginal differs at t=" + std::to_string(t));
  }
  EXPECT(t == 5, "expected steps 0..4");
  return {true, "walk_0..walk_4 exact"};
}

Outcome ac3_walk_samples() {
  auto e = dsl::compile(program_text("walk.mstr"));
  for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 42ULL, 123456789ULL}) {
    Rng rng(seed);
    auto out = run_sample(e.at("walk"), {}, 1000, rng);
    EXPECT(out.size() == 1000 && out[0][0] == I(0), "output_0 != 0 for seed " + std::to_string(seed));
    for (std::size_t t = 0; t + 1 < out.size(); ++t)
      EXPECT(std::abs(small(out[t + 1][0]) - small(out[t][0])) == 1,
             "step " + std::to_string(t) + " of seed " + std::to_string(seed) + " is not +-1");
  }
  return {true, "5 seeds x 1000 steps"};
}

std::vector<std::int64_t> urn(const Value& v) {
  auto s = v.as_set();
  return {s.begin(), s.end()};
}

Outcome ac4_ehrenfest() {
  auto e = dsl::compile(program_text("ehrenfest.mstr"));
  const auto& urns = e.at("urns");
  for (std::uint64_t seed : {0ULL, 3ULL, 99ULL}) {
    Rng rng(seed);
    auto out = run_sample(urns, {}, 200, rng);
    std::vector<std::int64_t> prev;
    for (std::size_t t = 0; t < out.size(); ++t) {
      auto pair = out[t][0].as_tuple();
      auto a = urn(pair[0]), b = urn(pair[1]);
      std::vector<std::int64_t> all = a;
      all.insert(all.end(), b.begin(), b.end());
      std::sort(all.begin(), all.end());
      EXPECT(all == (std::vector<std::int64_t>{1, 2, 3, 4}), "not a partition at t=" + std::to_string(t));
      if (t > 0) {
        std::vector<std::int64_t> diff;
        std::set_symmetric_difference(prev.begin(), prev.end(), a.begin(), a.end(), std::back_inserter(diff));
        EXPECT(diff.size() == 1, "not a one-ball move at t=" + std::to_string(t));
      }
      prev = a;
    }
  }
  // The program emits its initial state at step 0, so step t has seen t moves.
  auto marg = step_marginals(urns, {}, 7);
  for (std::size_t t = 0; t <= 6; ++t) {
    std::map<std::int64_t, Rat> got;
    for (const auto& [v, p] : marg[t]) {
      const Value& pair = v.kind() == Value::Kind::Tuple && v.as_tuple().size() == 1 ? v.as_tuple()[0] : v;
      got[static_cast<std::int64_t>(pair.as_tuple()[0].as_set().size())] += p;
    }
    EXPECT(got == oracle::ehrenfest_size(static_cast<unsigned>(t)), "|urn1| differs at t=" + std::to_string(t));
  }
  return {true, "3 seeds x 200 steps; |urn1| exact for t<=6"};
}

Outcome law_outcome(const LawReport& r) {
  std::size_t checks = r.results.size();
  EXPECT(r.passed(), std::to_string(r.failures()) + " failures: " + r.json());
  return {true, std::to_string(checks) + " checks, 0 failures"};
}

Outcome ac5_axioms() { return law_outcome(axiom_suite(2024, 100, 4)); }
Outcome ac6_category() { return law_outcome(category_suite(2024, 100, 4)); }

Outcome ac7_causality() {
  std::size_t streams = 0;
  for (const char* f : {"fib.mstr", "walk.mstr", "ehrenfest.mstr", "silent.mstr"}) {
    auto e = dsl::compile(program_text(f));
    for (const auto& [name, s] : e.streams) {
      EXPECT(check_causality(s, InputSpec::from_schedule(), 5).passed, std::string(f) + ": " + name + " acausal");
      ++streams;
    }
  }
  // Input-driven programs over a two-element domain.
  const std::string header = "domain Bit = {0, 1}\ninput x : Bit\ninput y : Bit\n";
  for (const std::string body : {"stream acc : Int = x fby (acc + wait(x))\n",
                                 "stream noisy : Int = unif(0, 1) + x + (0 fby wait(y))\n"}) {
    for (const auto& [name, s] : dsl::compile(header + body).streams) {
      EXPECT(check_causality(s, InputSpec::from_schedule(), 5).passed, name + " acausal");
      ++streams;
    }
  }
  const Ty bit = bit_type();
  Rng rng(77);
  for (int i = 0; i < 50; ++i) {
    auto f = random_stream(rng, TypeSchedule::constant({bit}), TypeSchedule::constant({bit}), 3);
    EXPECT(check_causality(f, InputSpec::from_schedule(), 5).passed, "random stream " + std::to_string(i) + " acausal");
  }
  auto neg = check_causality(testlib::PeekingProcess(), 5);
  EXPECT(!neg.passed, "negative control passed");
  EXPECT(!neg.history.empty(), "negative control failed without a witness");
  return {true, std::to_string(streams) + " program streams + 50 random causal; control caught at step " +
                    std::to_string(neg.step)};
}

Outcome ac8_equivalences() {
  const Ty bit = bit_type();
  const auto spec = InputSpec::from_schedule();
  auto sigma = stream_wiring(TypeSchedule::constant({Ty::delay(bit), bit}), {1, 0});
  EXPECT(obs_equiv(wait(bit), feedback(sigma, 1), spec, 5).equal, "wait != fbk(sigma)");
  EXPECT(obs_equiv_enumerate(wait(bit), feedback(sigma, 1), spec, 5).equal, "wait != fbk(sigma) (enumerated)");

  auto discard = stream_structural(Structural::Discard, TypeSchedule::constant({bit}));
  EXPECT(obs_equiv(testlib::store_first(bit), discard, spec, 5).equal, "store_first != discard");
  EXPECT(obs_equiv_enumerate(testlib::store_first(bit), discard, spec, 5).equal, "store_first != discard (enumerated)");

  EXPECT(obs_equiv(testlib::silent_walk(), testlib::nothing(), spec, 5).equal, "discard;walk != nothing");
  auto silent = dsl::compile(program_text("silent.mstr"));
  EXPECT(obs_equiv(silent.at("silent"), silent.at("nothing"), spec, 5).equal, "DSL silent != nothing");
  EXPECT(obs_equiv_enumerate(silent.at("silent"), silent.at("nothing"), spec, 5).equal,
         "DSL silent != nothing (enumerated)");
  return {true, "3 equivalences at depth 5, both routes"};
}

Outcome ac9_causal_functions() {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    auto p = testlib::random_program(rng);
    const std::string src = dsl::print(p);
    auto s = dsl::compile(src).at("out");
    History h;
    for (int t = 0; t < 8; ++t) h.push_back({I(static_cast<std::int64_t>(rng.below(2))), I(static_cast<std::int64_t>(rng.below(2)))});
    auto want = testlib::reference_eval(p, "out", h, 8);
    auto got = causal_eval(s, h);
    EXPECT(got.size() == 8, "wrong length for:\n" + src);
    for (std::size_t t = 0; t < 8; ++t) EXPECT(got[t][0] == want[t], "disagrees at t=" + std::to_string(t) + " for:\n" + src);
    for (std::size_t k = 0; k < 8; ++k) {
      History m = h;
      for (std::size_t t = k + 1; t < 8; ++t) m[t] = {I(static_cast<std::int64_t>(rng.below(2))), I(static_cast<std::int64_t>(rng.below(2)))};
      auto again = causal_eval(s, m);
      for (std::size_t t = 0; t <= k; ++t)
        EXPECT(again[t] == got[t], "prefix moved at t=" + std::to_string(t) + " after mutating past " + std::to_string(k));
    }
  }
  return {true, "20 programs x 8 steps; prefixes stable under 8 mutations each"};
}

struct Criterion {
  const char* id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "fibonacci golden", 1, ac1_fibonacci},
      {"AC2", "walk exact distribution", 1, ac2_walk_distribution},
      {"AC3", "walk sample shape", 1, ac3_walk_samples},
      {"AC4", "ehrenfest urns", 5, ac4_ehrenfest},
      {"AC5", "feedback axioms", 60, ac5_axioms},
      {"AC6", "category laws", 60, ac6_category},
      {"AC7", "causality", 60, ac7_causality},
      {"AC8", "observational equivalences", 5, ac8_equivalences},
      {"AC9", "causal functions", 10, ac9_causal_functions},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs >= c.limit_s) o = {false, "too slow"};
    failed += !o.ok;
    std::cout << c.id << ' ' << (o.ok ? "PASS" : "FAIL") << ' ' << c.title << " (" << std::fixed << std::setprecision(3)
              << secs << " s, limit " << std::setprecision(0) << c.limit_s << " s): " << o.note << std::endl;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
