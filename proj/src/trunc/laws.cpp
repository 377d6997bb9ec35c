#include "mstream/laws.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "mstream/error.hpp"
#include "mstream/json.hpp"
#include "mstream/trunc.hpp"

namespace mstream {

Ty bit_type() { return Ty::ints({0, 1}, "Bit"); }

Ty random_base(Rng& rng) {
  // Two thirds binary keeps enumeration cheap; ternary exercises wider supports.
  return rng.below(std::uint64_t{3}) < 2 ? bit_type() : Ty::ints({0, 1, 2}, "Tri");
}

Kernel random_kernel(Rng& rng, const std::vector<Ty>& in, const std::vector<Ty>& out, std::string name) {
  auto inputs = enumerate_inputs(in);
  std::vector<Value> outcomes;
  for (auto& o : enumerate_inputs(out)) outcomes.push_back(Value::tuple(std::move(o)));
  auto table = std::make_shared<std::unordered_map<Value, Dist, ValueHash>>();
  for (const auto& x : inputs) {
    const std::uint64_t support = 1 + rng.below(std::min<std::uint64_t>(3, outcomes.size()));
    // Pick `support` distinct outcomes by a partial shuffle.
    std::vector<Value> pool = outcomes;
    for (std::uint64_t i = 0; i < support; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    // Split a denominator d <= 8 into `support` positive parts.
    const std::uint64_t d = support + rng.below(9 - support);
    std::vector<std::uint64_t> cuts;
    std::vector<std::uint64_t> spots;
    for (std::uint64_t c = 1; c < d; ++c) spots.push_back(c);
    for (std::uint64_t i = 0; i + 1 < support; ++i) {
      const auto j = i + rng.below(spots.size() - i);
      std::swap(spots[i], spots[j]);
      cuts.push_back(spots[i]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(d);
    std::vector<Dist::Entry> entries;
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < support; ++i) {
      entries.emplace_back(pool[i], Rat(static_cast<std::int64_t>(cuts[i] - prev), static_cast<std::int64_t>(d)));
      prev = cuts[i];
    }
    table->emplace(pack(x), Dist::from_weights(std::move(entries)));
  }
  return Kernel::stoch(std::move(name), in, out, [table](std::span<const Value> x) { return table->at(pack(x)); });
}

MStream random_lift(std::uint64_t seed, TypeSchedule in, TypeSchedule out) {
  auto fam = KernelFamily::generator([seed, in, out](std::size_t t) {
    Rng r(mix_seed(seed, t));
    return random_kernel(r, in.at(t), out.at(t));
  });
  return lift_sequence(std::move(fam), std::move(in), std::move(out));
}

MStream random_stream(Rng& rng, const TypeSchedule& in, const TypeSchedule& out, int size) {
  const std::uint64_t choice = size <= 0 ? 0 : rng.below(std::uint64_t{4});
  switch (choice) {
    case 1: {
      auto mid = TypeSchedule::constant({random_base(rng)});
      auto f = random_stream(rng, in, mid, size - 1);
      return seq(f, random_stream(rng, mid, out, size - 1));
    }
    case 2: {
      auto s = TypeSchedule::constant({random_base(rng)});
      auto body = random_stream(rng, TypeSchedule::concat(TypeSchedule::delayed(s), in),
                                TypeSchedule::concat(s, out), size - 1);
      return feedback(body, 1);
    }
    case 3: {
      const auto i = rng.below(std::uint64_t{in.size() + 1});
      const auto j = rng.below(std::uint64_t{out.size() + 1});
      auto f = random_stream(rng, TypeSchedule::slice(in, 0, i), TypeSchedule::slice(out, 0, j), size - 1);
      auto g = random_stream(rng, TypeSchedule::slice(in, i, in.size() - i),
                             TypeSchedule::slice(out, j, out.size() - j), size - 1);
      return par(f, g);
    }
    default:
      return random_lift(rng.next(), in, out);
  }
}

std::size_t LawReport::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const LawResult& r) { return !r.passed; }));
}

std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> LawReport::tally() const {
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> out;
  for (const auto& r : results) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == r.law; });
    if (it == out.end()) {
      out.push_back({r.law, {0, 0}});
      it = out.end() - 1;
    }
    it->second.first += r.passed;
    it->second.second += 1;
  }
  return out;
}

std::string LawReport::json() const {
  std::string s = "{\"verdict\":\"" + std::string(passed() ? "pass" : "fail") + "\",\"laws\":[";
  bool first = true;
  for (const auto& [law, counts] : tally()) {
    s += (first ? "" : ",") + std::string("{\"law\":") + json_quote(law) + ",\"passed\":" +
         std::to_string(counts.first) + ",\"checked\":" + std::to_string(counts.second) + "}";
    first = false;
  }
  s += "],\"failures\":[";
  first = true;
  for (const auto& r : results) {
    if (r.passed) continue;
    s += (first ? "" : ",") + std::string("{\"law\":") + json_quote(r.law) + ",\"instance\":" +
         std::to_string(r.instance) + ",\"seed\":" + std::to_string(r.seed) + ",\"detail\":" +
         (r.detail.empty() ? "null" : r.detail) + "}";
    first = false;
  }
  return s + "]}";
}

namespace {

using Check = std::pair<std::string, std::pair<MStream, MStream>>;

LawResult judge(const std::string& law, std::size_t instance, std::uint64_t seed, const MStream& lhs,
                const MStream& rhs, std::size_t depth) {
  LawResult r{law, instance, seed, true, ""};
  try {
    auto rep = obs_equiv(lhs, rhs, InputSpec::from_schedule(), depth);
    r.passed = rep.equal;
    if (!rep.equal) r.detail = rep.json();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = json_quote(e.what());
  }
  return r;
}

TypeSchedule one(const Ty& t) { return TypeSchedule::constant({t}); }

// Both sides of each feedback axiom on freshly drawn random streams.
std::vector<Check> axiom_instance(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Check> out;
  constexpr int kSize = 1;
  auto X = one(bit_type()), Y = one(random_base(rng)), S = one(random_base(rng)), T = one(random_base(rng));
  auto dS = TypeSchedule::delayed(S), dT = TypeSchedule::delayed(T);
  auto X2 = one(bit_type()), Y2 = one(random_base(rng));
  {
    auto u = random_stream(rng, X2, X, kSize);
    auto f = random_stream(rng, TypeSchedule::concat(dS, X), TypeSchedule::concat(S, Y), kSize);
    auto v = random_stream(rng, Y, Y2, kSize);
    auto lhs = feedback(seq(seq(par(stream_identity(dS), u), f), par(stream_identity(S), v)), 1);
    auto rhs = seq(seq(u, feedback(f, 1)), v);
    out.push_back({"A1 tightening", {lhs, rhs}});
  }
  {
    auto f = random_stream(rng, X, Y, kSize);
    out.push_back({"A2 vanishing", {feedback(f, 0), f}});
  }
  {
    auto in = TypeSchedule::concat(TypeSchedule::concat(dS, dT), X);
    auto outs = TypeSchedule::concat(TypeSchedule::concat(S, T), Y);
    auto f = random_stream(rng, in, outs, kSize);
    out.push_back({"A3 joining", {feedback(feedback(f, 1), 1), feedback(f, 2)}});
  }
  {
    auto f = random_stream(rng, TypeSchedule::concat(dS, X), TypeSchedule::concat(S, Y), kSize);
    auto g = random_stream(rng, X2, Y2, kSize);
    out.push_back({"A4 strength", {par(feedback(f, 1), g), feedback(par(f, g), 1)}});
  }
  {
    Rng hk(rng.next());
    auto h = lift_constant(random_kernel(hk, S.at(0), T.at(0), "h"));
    auto f = random_stream(rng, TypeSchedule::concat(dT, X), TypeSchedule::concat(S, Y), kSize);
    auto lhs = feedback(seq(par(delay(h), stream_identity(X)), f), 1);
    auto rhs = feedback(seq(f, par(h, stream_identity(Y))), 1);
    out.push_back({"A5 sliding", {lhs, rhs}});
  }
  return out;
}

std::vector<Check> category_instance(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Check> out;
  constexpr int kSize = 1;
  auto A = one(bit_type()), B = one(random_base(rng)), C = one(random_base(rng)), D = one(random_base(rng));
  auto A2 = one(bit_type()), B2 = one(random_base(rng)), C2 = one(random_base(rng));
  {
    auto f = random_stream(rng, A, B, kSize), g = random_stream(rng, B, C, kSize), h = random_stream(rng, C, D, kSize);
    out.push_back({"seq associativity", {seq(seq(f, g), h), seq(f, seq(g, h))}});
  }
  {
    auto f = random_stream(rng, A, B, kSize);
    out.push_back({"seq left unit", {seq(stream_identity(A), f), f}});
    out.push_back({"seq right unit", {seq(f, stream_identity(B)), f}});
  }
  {
    auto f = random_stream(rng, A, B, kSize), g = random_stream(rng, B, C, kSize);
    auto f2 = random_stream(rng, A2, B2, kSize), g2 = random_stream(rng, B2, C2, kSize);
    out.push_back({"par functoriality", {seq(par(f, f2), par(g, g2)), par(seq(f, g), seq(f2, g2))}});
    out.push_back({"par identity", {par(stream_identity(A), stream_identity(A2)),
                                    stream_identity(TypeSchedule::concat(A, A2))}});
  }
  {
    auto f = random_stream(rng, A, B, kSize), g = random_stream(rng, A2, B2, kSize);
    auto h = random_stream(rng, one(bit_type()), C, kSize);
    out.push_back({"par associativity", {par(par(f, g), h), par(f, par(g, h))}});
    auto lhs = seq(par(f, g), stream_structural(Structural::Symmetry, TypeSchedule::concat(B, B2)));
    auto rhs = seq(stream_structural(Structural::Symmetry, TypeSchedule::concat(A, A2)), par(g, f));
    out.push_back({"symmetry naturality", {lhs, rhs}});
  }
  {
    auto f = random_stream(rng, A, B, kSize), g = random_stream(rng, B, C, kSize);
    out.push_back({"delay functoriality", {delay(seq(f, g)), seq(delay(f), delay(g))}});
    out.push_back({"delay identity", {delay(stream_identity(A)), stream_identity(TypeSchedule::delayed(A))}});
  }
  return out;
}

LawReport run_suite(const std::function<std::vector<Check>(std::uint64_t)>& make, std::uint64_t seed,
                    std::size_t instances, std::size_t depth, bool parallel) {
  std::vector<std::vector<LawResult>> per(instances);
  auto body = [&](std::size_t i) {
    const std::uint64_t s = mix_seed(seed, i);
    try {
      for (const auto& [law, sides] : make(s)) per[i].push_back(judge(law, i, s, sides.first, sides.second, depth));
    } catch (const std::exception& e) {
      per[i].push_back({"instance construction", i, s, false, json_quote(e.what())});
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < instances; ++i) body(i);
  } else {
    for (std::size_t i = 0; i < instances; ++i) body(i);
  }
  LawReport rep;
  for (auto& v : per)
    for (auto& r : v) rep.results.push_back(std::move(r));
  return rep;
}

}  // namespace

LawReport axiom_suite(std::uint64_t seed, std::size_t instances, std::size_t depth) {
  return run_suite(axiom_instance, seed, instances, depth, true);
}
LawReport axiom_suite_serial(std::uint64_t seed, std::size_t instances, std::size_t depth) {
  return run_suite(axiom_instance, seed, instances, depth, false);
}
LawReport category_suite(std::uint64_t seed, std::size_t instances, std::size_t depth) {
  return run_suite(category_instance, seed, instances, depth, true);
}
LawReport category_suite_serial(std::uint64_t seed, std::size_t instances, std::size_t depth) {
  return run_suite(category_instance, seed, instances, depth, false);
}

}  // namespace mstream
