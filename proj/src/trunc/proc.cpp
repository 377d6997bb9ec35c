#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>
#include <omp.h>

#include "mstream/error.hpp"
#include "mstream/json.hpp"
#include "mstream/trunc.hpp"

namespace mstream {

InputSpec InputSpec::types(std::vector<Ty> wires) {
  InputSpec s;
  s.types_ = std::move(wires);
  return s;
}

InputSpec InputSpec::fixed(History h) {
  InputSpec s;
  s.fixed_ = std::move(h);
  return s;
}

std::vector<Step> InputSpec::candidates(const TypeSchedule& in, std::size_t t) const {
  if (fixed_) {
    if (t >= fixed_->size())
      throw IllTyped("fixed input history has " + std::to_string(fixed_->size()) + " steps, step " +
                     std::to_string(t) + " requested");
    return {(*fixed_)[t]};
  }
  std::vector<Ty> tys;
  if (types_) {
    for (const auto& ty : *types_) tys.push_back(ty.at(t));
  } else {
    tys = in.at(t);
  }
  if (tys.size() != in.size())
    throw SignatureMismatch("input spec has " + std::to_string(tys.size()) + " wires, stream has " +
                            std::to_string(in.size()));
  for (std::size_t w = 0; w < tys.size(); ++w)
    if (!tys[w].has_domain())
      throw MissingDomain("input wire " + std::to_string(w) + " at step " + std::to_string(t) + " has type " +
                          tys[w].str() + " without a finite domain");
  return enumerate_inputs(tys);
}

Value history_value(const History& h) {
  std::vector<Value> steps;
  steps.reserve(h.size());
  for (const auto& s : h) steps.push_back(pack(s));
  return Value::tuple(std::move(steps));
}

Dist truncate_history(const Dist& d, std::size_t t) {
  DistBuilder b;
  for (const auto& [v, p] : d) {
    auto steps = v.as_tuple();
    if (t >= steps.size())
      throw std::out_of_range("history of length " + std::to_string(steps.size()) + " has no step " +
                              std::to_string(t));
    b.add(Value::tuple(std::vector<Value>(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(t + 1))), p);
  }
  return std::move(b).build();
}

const Dist& JointDist::at(const History& h) const {
  auto it = by_input.find(history_value(h));
  if (it == by_input.end()) throw std::out_of_range("no joint distribution for that input history");
  return it->second;
}

namespace {

void check_step(const Kernel& now, std::size_t mem, const Step& x, std::size_t t) {
  const auto& tys = now.inputs();
  if (x.size() + mem != tys.size())
    throw IllTyped("step " + std::to_string(t) + ": expected " + std::to_string(tys.size() - mem) +
                   " input wires, got " + std::to_string(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!tys[mem + i].admits(x[i]))
      throw IllTyped("step " + std::to_string(t) + ": input " + x[i].str() + " does not inhabit " +
                     tys[mem + i].str());
}

// Serial evolution of one history: keys are [memory, output history].
Dist evolve(const MStream& f, const History& h) {
  if (h.empty()) throw std::invalid_argument("input history must cover at least step 0");
  const std::size_t cap = support_cap();
  std::vector<std::pair<Value, Rat>> state{{Value::tuple({Value::tuple({}), Value::tuple({})}), Rat(1)}};
  const MStream* s = &f;
  std::vector<Value> buf, hist;
  for (std::size_t t = 0; t < h.size(); ++t) {
    if (t > 0) s = &s->later();
    const Kernel& now = s->now();
    const std::size_t m = s->mem_in().size();
    const std::size_t mo = s->mem_out().size();
    check_step(now, m, h[t], t);
    DistBuilder next(cap);
    for (const auto& [key, p] : state) {
      auto parts = key.as_tuple();
      auto mem = parts[0].as_tuple();
      buf.assign(mem.begin(), mem.end());
      buf.insert(buf.end(), h[t].begin(), h[t].end());
      auto past = parts[1].as_tuple();
      now.impl().exact(buf, p, [&](std::span<const Value> out, const Rat& w) {
        hist.assign(past.begin(), past.end());
        hist.push_back(pack(out.subspan(mo)));
        next.add(Value::tuple({pack(out.first(mo)), Value::tuple(hist)}), w);
      });
    }
    Dist d = std::move(next).build();
    state.assign(d.begin(), d.end());
  }
  DistBuilder out(cap);
  for (const auto& [key, p] : state) out.add(key.as_tuple()[1], p);
  return std::move(out).build();
}

void enumerate_histories(const MStream& f, const InputSpec& spec, std::size_t n,
                         const std::function<void(const History&)>& visit) {
  std::vector<std::vector<Step>> cands;
  for (std::size_t t = 0; t <= n; ++t) cands.push_back(spec.candidates(f.inputs(), t));
  History h(n + 1);
  std::function<void(std::size_t)> rec = [&](std::size_t t) {
    if (t > n) {
      visit(h);
      return;
    }
    for (const auto& c : cands[t]) {
      h[t] = c;
      rec(t + 1);
    }
  };
  rec(0);
}

// ---- prefix-sharing evaluation -------------------------------------------

// Output histories interned as paths in a trie, so a state key is a memory
// value plus a node id.
class Trie {
 public:
  std::uint32_t child(std::uint32_t parent, const Value& step) {
    Key k{parent, step};
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({parent, step});
    index_.emplace(std::move(k), id);
    return id;
  }
  Value history(std::uint32_t id) const {
    std::vector<Value> steps;
    while (id != 0) {
      steps.push_back(nodes_[id].second);
      id = nodes_[id].first;
    }
    return Value::tuple(std::vector<Value>(steps.rbegin(), steps.rend()));
  }

 private:
  struct Key {
    std::uint32_t parent;
    Value step;
    bool operator==(const Key& o) const { return parent == o.parent && step == o.step; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.step.hash() * 0x9e3779b97f4a7c15ULL ^ k.parent; }
  };
  std::vector<std::pair<std::uint32_t, Value>> nodes_{{0, Value()}};
  std::unordered_map<Key, std::uint32_t, KeyHash> index_;
};

struct Entry {
  Value mem;
  std::uint32_t hist;
  Rat p;
};

struct StateKey {
  Value mem;
  std::uint32_t hist;
  bool operator==(const StateKey& o) const { return hist == o.hist && mem == o.mem; }
};
struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const { return k.mem.hash() * 31 + k.hist; }
};

std::vector<Entry> advance(const MStream& s, const std::vector<Entry>& state, const Step& x, std::size_t t,
                           Trie& trie, std::size_t cap) {
  const Kernel& now = s.now();
  const std::size_t m = s.mem_in().size();
  const std::size_t mo = s.mem_out().size();
  check_step(now, m, x, t);
  std::unordered_map<StateKey, std::size_t, StateKeyHash> index;
  std::vector<Entry> next;
  std::vector<Value> buf;
  for (const auto& e : state) {
    auto mem = e.mem.as_tuple();
    buf.assign(mem.begin(), mem.end());
    buf.insert(buf.end(), x.begin(), x.end());
    now.impl().exact(buf, e.p, [&](std::span<const Value> out, const Rat& w) {
      StateKey k{pack(out.first(mo)), trie.child(e.hist, pack(out.subspan(mo)))};
      auto it = index.find(k);
      if (it != index.end()) {
        next[it->second].p += w;
        return;
      }
      if (next.size() >= cap) throw SupportOverflow(cap, next.size() + 1);
      index.emplace(k, next.size());
      next.push_back({std::move(k.mem), k.hist, w});
    });
  }
  return next;
}

}  // namespace

JointDist proc_semantics_serial(const MStream& f, const InputSpec& spec, std::size_t n) {
  JointDist j;
  j.depth = n;
  enumerate_histories(f, spec, n, [&](const History& h) { j.by_input.emplace(history_value(h), evolve(f, h)); });
  return j;
}

JointDist proc_semantics(const MStream& f, const InputSpec& spec, std::size_t n) {
  std::vector<std::vector<Step>> cands;
  for (std::size_t t = 0; t <= n; ++t) cands.push_back(spec.candidates(f.inputs(), t));

  // Split the prefix tree into enough independent subtrees to keep every
  // thread busy; each subtree replays its short prefix on its own.
  const std::size_t threads = static_cast<std::size_t>(omp_get_max_threads());
  std::size_t split = 0, tasks = 1;
  while (split <= n && tasks < 4 * threads) tasks *= cands[split++].size();
  std::vector<History> prefixes{{}};
  for (std::size_t t = 0; t < split; ++t) {
    std::vector<History> grown;
    for (const auto& p : prefixes)
      for (const auto& c : cands[t]) {
        grown.push_back(p);
        grown.back().push_back(c);
      }
    prefixes = std::move(grown);
  }

  const std::size_t cap = support_cap();
  std::vector<std::vector<std::pair<Value, Dist>>> results(prefixes.size());
  std::exception_ptr failure;
  std::mutex failure_mu;

  // Streams are forced lazily; force the spine once so threads only read.
  {
    const MStream* s = &f;
    for (std::size_t t = 0; t < n; ++t) s = &s->later();
  }

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    try {
      Trie trie;
      History h = prefixes[i];
      std::vector<Entry> state{{Value::tuple({}), 0, Rat(1)}};
      const MStream* s = &f;
      for (std::size_t t = 0; t < h.size(); ++t) {
        if (t > 0) s = &s->later();
        state = advance(*s, state, h[t], t, trie, cap);
      }
      std::function<void(const MStream*, std::size_t, const std::vector<Entry>&)> rec =
          [&](const MStream* cur, std::size_t t, const std::vector<Entry>& st) {
            if (t > n) {
              DistBuilder b(cap);
              for (const auto& e : st) b.add(trie.history(e.hist), e.p);
              results[i].emplace_back(history_value(h), std::move(b).build());
              return;
            }
            const MStream* here = t == 0 ? cur : &cur->later();
            for (const auto& c : cands[t]) {
              h.push_back(c);
              rec(here, t + 1, advance(*here, st, c, t, trie, cap));
              h.pop_back();
            }
          };
      if (h.size() == n + 1) {
        rec(nullptr, n + 1, state);
      } else {
        rec(s, h.size(), state);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  JointDist j;
  j.depth = n;
  for (auto& r : results)
    for (auto& [k, d] : r) j.by_input.emplace(std::move(k), std::move(d));
  return j;
}

Dist run_exact(const MStream& f, const History& inputs) { return evolve(f, inputs); }

std::vector<Dist> step_marginals(const MStream& f, const History& inputs, std::size_t steps) {
  if (!inputs.empty() && inputs.size() < steps)
    throw IllTyped("need " + std::to_string(steps) + " input steps, got " + std::to_string(inputs.size()));
  const std::size_t cap = support_cap();
  std::vector<Dist> result;
  std::vector<std::pair<Value, Rat>> mems{{Value::tuple({}), Rat(1)}};
  const MStream* s = &f;
  std::vector<Value> buf;
  const Step none;
  for (std::size_t t = 0; t < steps; ++t) {
    if (t > 0) s = &s->later();
    const Step& x = inputs.empty() ? none : inputs[t];
    const std::size_t m = s->mem_in().size();
    const std::size_t mo = s->mem_out().size();
    check_step(s->now(), m, x, t);
    DistBuilder next(cap), out(cap);
    for (const auto& [mem, p] : mems) {
      auto mv = mem.as_tuple();
      buf.assign(mv.begin(), mv.end());
      buf.insert(buf.end(), x.begin(), x.end());
      s->now().impl().exact(buf, p, [&](std::span<const Value> o, const Rat& w) {
        next.add(pack(o.first(mo)), w);
        out.add(pack(o.subspan(mo)), w);
      });
    }
    result.push_back(std::move(out).build());
    Dist d = std::move(next).build();
    mems.assign(d.begin(), d.end());
  }
  return result;
}

namespace {

class StreamProcess final : public TruncatedProcess {
 public:
  StreamProcess(MStream f, InputSpec spec) : f_(std::move(f)), spec_(std::move(spec)) {}
  std::vector<Step> candidates(std::size_t t) const override { return spec_.candidates(f_.inputs(), t); }
  Dist joint(const History& h) const override { return evolve(f_, h); }

 private:
  MStream f_;
  InputSpec spec_;
};

// Joint distributions precomputed at every depth by the prefix-sharing path.
class TableProcess final : public TruncatedProcess {
 public:
  TableProcess(const MStream& f, const InputSpec& spec, std::size_t n) : f_(f), spec_(spec) {
    for (std::size_t d = 0; d <= n; ++d) tables_.push_back(proc_semantics(f, spec, d));
  }
  std::vector<Step> candidates(std::size_t t) const override { return spec_.candidates(f_.inputs(), t); }
  Dist joint(const History& h) const override { return tables_.at(h.size() - 1).at(h); }

 private:
  MStream f_;
  InputSpec spec_;
  std::vector<JointDist> tables_;
};

}  // namespace

std::unique_ptr<TruncatedProcess> as_process(const MStream& f, const InputSpec& spec) {
  return std::make_unique<StreamProcess>(f, spec);
}

CausalityReport check_causality(const TruncatedProcess& p, std::size_t n) {
  std::vector<std::vector<Step>> cands;
  for (std::size_t t = 0; t <= n; ++t) cands.push_back(p.candidates(t));
  std::map<Value, Dist> prefix_cache;
  auto prefix_joint = [&](const History& h) -> const Dist& {
    Value k = history_value(h);
    auto it = prefix_cache.find(k);
    if (it == prefix_cache.end()) it = prefix_cache.emplace(std::move(k), p.joint(h)).first;
    return it->second;
  };
  CausalityReport r;
  History h(n + 1);
  std::function<bool(std::size_t)> rec = [&](std::size_t t) -> bool {
    if (t > n) {
      ++r.histories_checked;
      const Dist full = p.joint(h);
      for (std::size_t s = 0; s < n; ++s) {
        History pre(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(s + 1));
        Dist marg = truncate_history(full, s);
        const Dist& direct = prefix_joint(pre);
        if (!(marg == direct)) {
          r.passed = false;
          r.step = s;
          r.history = h;
          r.marginal = std::move(marg);
          r.prefix_joint = direct;
          return false;
        }
      }
      return true;
    }
    for (const auto& c : cands[t]) {
      h[t] = c;
      if (!rec(t + 1)) return false;
    }
    return true;
  };
  rec(0);
  return r;
}

CausalityReport check_causality(const MStream& f, const InputSpec& spec, std::size_t n) {
  TableProcess p(f, spec, n);
  return check_causality(p, n);
}

namespace {

std::string history_json(const History& h) {
  std::string r = "[";
  for (std::size_t i = 0; i < h.size(); ++i) r += (i ? "," : "") + to_json(h[i]);
  return r + "]";
}

}  // namespace

EquivReport obs_equiv_enumerate(const MStream& f, const MStream& g, const InputSpec& spec, std::size_t n) {
  if (!f.inputs().matches(g.inputs()) || !f.outputs().matches(g.outputs()))
    throw SignatureMismatch("streams have different schedules: " + f.inputs().str() + " -> " +
                            f.outputs().str() + " vs " + g.inputs().str() + " -> " + g.outputs().str());
  const JointDist a = proc_semantics(f, spec, n);
  const JointDist b = proc_semantics(g, spec, n);
  EquivReport r;
  for (const auto& [key, da] : a.by_input) {
    const Dist& db = b.by_input.at(key);
    if (da == db) continue;
    std::size_t t = 0;
    while (t < n && truncate_history(da, t) == truncate_history(db, t)) ++t;
    if (!r.equal && r.step <= t) continue;
    r.equal = false;
    r.step = t;
    r.history.clear();
    for (const auto& step : key.as_tuple()) {
      if (r.history.size() > t) break;
      auto wires = step.as_tuple();
      r.history.emplace_back(wires.begin(), wires.end());
    }
    r.left = truncate_history(da, t);
    r.right = truncate_history(db, t);
  }
  return r;
}

namespace {

// A reachable weighted memory state of both streams, tagged with the input
// history that reached it.
struct Reach {
  std::vector<std::pair<Value, Rat>> f, g;
  History inputs;
};

using SparseRow = std::map<std::uint32_t, Rat>;

// Incremental fraction-free elimination. Kept rows are scaled to integers
// and held in reduced echelon form with one shared denominator: the reduced
// rows are rows_[i].second / den_, each row equals den_ on its own pivot and
// vanishes on every other pivot. Every division below is exact.
class Echelon {
 public:
  // Keeps v when it is independent of the rows so far.
  bool insert(const SparseRow& v) {
    BigInt scale = 1;
    for (const auto& [col, x] : v) scale = boost::multiprecision::lcm(scale, x.den());
    IntRow w;
    for (const auto& [col, x] : v) w[col] = den_ * (x.num() * (scale / x.den()));
    for (const auto& [pivot, row] : rows_) {
      auto it = v.find(pivot);
      if (it == v.end()) continue;
      const BigInt c = it->second.num() * (scale / it->second.den());
      for (const auto& [col, n] : row) {
        BigInt& y = w[col];
        y -= c * n;
        if (y.is_zero()) w.erase(col);
      }
    }
    if (w.empty()) return false;
    const auto [pc, a] = *w.begin();
    for (auto& [pivot, row] : rows_) {
      auto hit = row.find(pc);
      const BigInt nc = hit == row.end() ? BigInt(0) : hit->second;
      for (auto& [col, n] : row) n *= a;
      if (!nc.is_zero())
        for (const auto& [col, y] : w) {
          BigInt& n = row[col];
          n -= nc * y;
          if (n.is_zero()) row.erase(col);
        }
      for (auto& [col, n] : row) n /= den_;
    }
    rows_.emplace_back(pc, std::move(w));
    den_ = a;
    return true;
  }

 private:
  using IntRow = std::map<std::uint32_t, BigInt>;
  std::vector<std::pair<std::uint32_t, IntRow>> rows_;
  BigInt den_ = 1;
};

using MemWeights = std::unordered_map<Value, Rat, ValueHash>;

// Pushes a weighted memory state through one step kernel, splitting the
// result by emitted output.
void push(const MStream& s, const std::vector<std::pair<Value, Rat>>& state, const Step& x, std::size_t t,
          std::map<Value, std::pair<MemWeights, MemWeights>>& by_output, bool left) {
  const std::size_t m = s.mem_in().size();
  const std::size_t mo = s.mem_out().size();
  check_step(s.now(), m, x, t);
  std::vector<Value> buf;
  for (const auto& [mem, w] : state) {
    auto mv = mem.as_tuple();
    buf.assign(mv.begin(), mv.end());
    buf.insert(buf.end(), x.begin(), x.end());
    s.now().impl().exact(buf, w, [&](std::span<const Value> out, const Rat& p) {
      auto& slot = by_output[pack(out.subspan(mo))];
      (left ? slot.first : slot.second)[pack(out.first(mo))] += p;
    });
  }
}

void fill_witness(EquivReport& r, const MStream& f, const MStream& g, const History& inputs) {
  const Dist da = run_exact(f, inputs);
  const Dist db = run_exact(g, inputs);
  const std::size_t n = inputs.size() - 1;
  std::size_t t = 0;
  while (t < n && truncate_history(da, t) == truncate_history(db, t)) ++t;
  r.equal = false;
  r.step = t;
  r.history.assign(inputs.begin(), inputs.begin() + static_cast<std::ptrdiff_t>(t + 1));
  r.left = truncate_history(da, t);
  r.right = truncate_history(db, t);
}

}  // namespace

EquivReport obs_equiv(const MStream& f, const MStream& g, const InputSpec& spec, std::size_t n) {
  if (!f.inputs().matches(g.inputs()) || !f.outputs().matches(g.outputs()))
    throw SignatureMismatch("streams have different schedules: " + f.inputs().str() + " -> " +
                            f.outputs().str() + " vs " + g.inputs().str() + " -> " + g.outputs().str());
  const std::size_t cap = support_cap();
  std::vector<Reach> basis{{{{Value::tuple({}), Rat(1)}}, {{Value::tuple({}), Rat(1)}}, {}}};
  const MStream* sf = &f;
  const MStream* sg = &g;
  for (std::size_t t = 0; t <= n; ++t) {
    if (t > 0) {
      sf = &sf->later();
      sg = &sg->later();
    }
    const auto cands = spec.candidates(f.inputs(), t);
    std::map<std::pair<bool, Value>, std::uint32_t> columns;
    auto column = [&](bool left, const Value& mem) {
      auto [it, fresh] = columns.try_emplace({left, mem}, static_cast<std::uint32_t>(columns.size()));
      if (fresh && columns.size() > cap) throw SupportOverflow(cap, columns.size());
      return it->second;
    };
    Echelon echelon;
    std::vector<Reach> next;
    for (const auto& b : basis) {
      for (const auto& x : cands) {
        std::map<Value, std::pair<MemWeights, MemWeights>> by_output;
        push(*sf, b.f, x, t, by_output, true);
        push(*sg, b.g, x, t, by_output, false);
        for (auto& [y, sides] : by_output) {
          SparseRow row;
          Reach r;
          for (auto& [mem, w] : sides.first) {
            if (w.is_zero()) continue;
            row[column(true, mem)] = w;
            r.f.emplace_back(mem, w);
          }
          for (auto& [mem, w] : sides.second) {
            if (w.is_zero()) continue;
            row[column(false, mem)] = w;
            r.g.emplace_back(mem, w);
          }
          if (!echelon.insert(row)) continue;
          r.inputs = b.inputs;
          r.inputs.push_back(x);
          next.push_back(std::move(r));
        }
      }
    }
    basis = std::move(next);
    // Agreement at depth t implies agreement at every shallower depth, so the
    // first level with a mass difference is the earliest differing step.
    for (const auto& b : basis) {
      Rat diff;
      for (const auto& [mem, w] : b.f) diff += w;
      for (const auto& [mem, w] : b.g) diff -= w;
      if (!diff.is_zero()) {
        EquivReport r;
        fill_witness(r, f, g, b.inputs);
        return r;
      }
    }
  }
  return {};
}

std::string EquivReport::json() const {
  if (equal) return "{\"verdict\":\"equal\"}";
  return "{\"verdict\":\"differ\",\"step\":" + std::to_string(step) + ",\"inputs\":" + history_json(history) +
         ",\"left\":" + to_json(left) + ",\"right\":" + to_json(right) + "}";
}

std::string CausalityReport::json() const {
  std::string r = "{\"verdict\":\"" + std::string(passed ? "causal" : "acausal") +
                  "\",\"histories\":" + std::to_string(histories_checked);
  if (!passed)
    r += ",\"step\":" + std::to_string(step) + ",\"inputs\":" + history_json(history) +
         ",\"marginal\":" + to_json(marginal) + ",\"prefix\":" + to_json(prefix_joint);
  return r + "}";
}

std::vector<Step> causal_eval(const MStream& f, const History& inputs) {
  std::vector<Step> out;
  std::vector<Value> mem, buf;
  const MStream* s = &f;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (t > 0) s = &s->later();
    if (!s->now().deterministic())
      throw Error("stream contains a stochastic kernel at step " + std::to_string(t));
    buf = mem;
    buf.insert(buf.end(), inputs[t].begin(), inputs[t].end());
    auto o = apply_det(s->now(), buf);
    const std::size_t mo = s->mem_out().size();
    mem.assign(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(mo));
    out.emplace_back(o.begin() + static_cast<std::ptrdiff_t>(mo), o.end());
  }
  return out;
}

std::vector<Step> causal_eval(const MStream& f, std::size_t steps) { return causal_eval(f, History(steps)); }

}  // namespace mstream
