#include "mstream/stream.hpp"

#include <atomic>

#include "mstream/error.hpp"

namespace mstream {

namespace {

std::atomic<std::size_t> g_forced{0};

std::vector<Ty> cat(const std::vector<Ty>& a, const std::vector<Ty>& b) {
  std::vector<Ty> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::vector<Ty> first(const std::vector<Ty>& a, std::size_t n) { return {a.begin(), a.begin() + n}; }

void append(std::vector<Value>& buf, std::span<const Value> s) { buf.insert(buf.end(), s.begin(), s.end()); }

}  // namespace

StreamNode::StreamNode(std::vector<Ty> mem_in, std::vector<Ty> mem_out, Kernel now, TypeSchedule in,
                       TypeSchedule out)
    : mem_in_(std::move(mem_in)),
      mem_out_(std::move(mem_out)),
      now_(std::move(now)),
      in_(std::move(in)),
      out_(std::move(out)) {}

const MStream& StreamNode::later() const {
  std::call_once(once_, [this] {
    later_ = std::make_unique<MStream>(make_later());
    g_forced.fetch_add(1, std::memory_order_relaxed);
  });
  return *later_;
}

std::size_t forced_laters() { return g_forced.load(std::memory_order_relaxed); }

KernelFamily KernelFamily::constant(Kernel k) {
  return generator([k](std::size_t) { return k; });
}

KernelFamily KernelFamily::eventually(std::vector<Kernel> prefix, Kernel rest) {
  return generator([prefix = std::move(prefix), rest](std::size_t t) { return t < prefix.size() ? prefix[t] : rest; });
}

KernelFamily KernelFamily::generator(std::function<Kernel(std::size_t)> fn) {
  return KernelFamily(std::make_shared<const Fn>(std::move(fn)), 0);
}

namespace {

// ---- memoryless ----------------------------------------------------------

Kernel checked_step(const KernelFamily& fam, std::size_t step, const TypeSchedule& in,
                    const TypeSchedule& out) {
  Kernel k = fam.at(0);
  if (!same_shape(k.inputs(), in.at(0)) || !same_shape(k.outputs(), out.at(0)))
    throw SignatureMismatch("step " + std::to_string(step) + ": kernel " + k.name() + " : " +
                            str(k.inputs()) + " -> " + str(k.outputs()) + " does not fit schedule " +
                            str(in.at(0)) + " -> " + str(out.at(0)));
  return k;
}

class LiftNode final : public StreamNode {
 public:
  LiftNode(KernelFamily fam, TypeSchedule in, TypeSchedule out, std::size_t step)
      : StreamNode({}, {}, checked_step(fam, step, in, out), in, out), fam_(std::move(fam)), step_(step) {}

 protected:
  MStream make_later() const override {
    return MStream(std::make_shared<LiftNode>(fam_.shifted(1), inputs().tail(), outputs().tail(), step_ + 1));
  }

 private:
  KernelFamily fam_;
  std::size_t step_;
};

// ---- sequential ----------------------------------------------------------

// [Mf, Mg, X] -> [Mf', Mg', Z]; f runs on [Mf, X], g on [Mg, Y].
class SeqNow final : public KernelImpl {
 public:
  SeqNow(const MStream& f, const MStream& g)
      : KernelImpl("seq", cat(cat(f.mem_in(), g.mem_in()), f.inputs().at(0)),
                   cat(cat(f.mem_out(), g.mem_out()), g.outputs().at(0)),
                   f.now().deterministic() && g.now().deterministic()),
        f_(f.now()),
        g_(g.now()),
        fm_(f.mem_in().size()),
        gm_(g.mem_in().size()),
        fm_out_(f.mem_out().size()) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    std::vector<Value> fin, gin, out;
    fin.reserve(in.size());
    append(fin, in.first(fm_));
    append(fin, in.subspan(fm_ + gm_));
    const KernelImpl& g = g_.impl();
    f_.impl().exact(fin, w, [&](std::span<const Value> fo, const Rat& w1) {
      gin.clear();
      append(gin, in.subspan(fm_, gm_));
      append(gin, fo.subspan(fm_out_));
      g.exact(gin, w1, [&](std::span<const Value> go, const Rat& w2) {
        out.clear();
        append(out, fo.first(fm_out_));
        append(out, go);
        emit(out, w2);
      });
    });
  }

  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    std::vector<Value> fin, fo, gin, go;
    append(fin, in.first(fm_));
    append(fin, in.subspan(fm_ + gm_));
    f_.impl().sample(fin, rng, fo);
    append(gin, in.subspan(fm_, gm_));
    append(gin, std::span<const Value>(fo).subspan(fm_out_));
    g_.impl().sample(gin, rng, go);
    append(out, std::span<const Value>(fo).first(fm_out_));
    append(out, go);
  }

 private:
  Kernel f_, g_;
  std::size_t fm_, gm_, fm_out_;
};

class SeqNode final : public StreamNode {
 public:
  SeqNode(MStream f, MStream g)
      : StreamNode(cat(f.mem_in(), g.mem_in()), cat(f.mem_out(), g.mem_out()),
                   Kernel(std::make_shared<SeqNow>(f, g)), f.inputs(), g.outputs()),
        f_(std::move(f)),
        g_(std::move(g)) {}

 protected:
  MStream make_later() const override { return MStream(std::make_shared<SeqNode>(f_.later(), g_.later())); }

 private:
  MStream f_, g_;
};

// ---- parallel ------------------------------------------------------------

// [Mf, Mg, X, X'] -> [Mf', Mg', Y, Y'].
class ParNow final : public KernelImpl {
 public:
  ParNow(const MStream& f, const MStream& g)
      : KernelImpl("par", cat(cat(cat(f.mem_in(), g.mem_in()), f.inputs().at(0)), g.inputs().at(0)),
                   cat(cat(cat(f.mem_out(), g.mem_out()), f.outputs().at(0)), g.outputs().at(0)),
                   f.now().deterministic() && g.now().deterministic()),
        f_(f.now()),
        g_(g.now()),
        fm_(f.mem_in().size()),
        gm_(g.mem_in().size()),
        fx_(f.inputs().size()),
        fm_out_(f.mem_out().size()),
        gm_out_(g.mem_out().size()) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    std::vector<Value> fin, gin, out;
    append(fin, in.first(fm_));
    append(fin, in.subspan(fm_ + gm_, fx_));
    append(gin, in.subspan(fm_, gm_));
    append(gin, in.subspan(fm_ + gm_ + fx_));
    const KernelImpl& g = g_.impl();
    f_.impl().exact(fin, w, [&](std::span<const Value> fo, const Rat& w1) {
      g.exact(gin, w1, [&](std::span<const Value> go, const Rat& w2) {
        out.clear();
        append(out, fo.first(fm_out_));
        append(out, go.first(gm_out_));
        append(out, fo.subspan(fm_out_));
        append(out, go.subspan(gm_out_));
        emit(out, w2);
      });
    });
  }

  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    std::vector<Value> fin, gin, fo, go;
    append(fin, in.first(fm_));
    append(fin, in.subspan(fm_ + gm_, fx_));
    append(gin, in.subspan(fm_, gm_));
    append(gin, in.subspan(fm_ + gm_ + fx_));
    f_.impl().sample(fin, rng, fo);
    g_.impl().sample(gin, rng, go);
    std::span<const Value> a(fo), b(go);
    append(out, a.first(fm_out_));
    append(out, b.first(gm_out_));
    append(out, a.subspan(fm_out_));
    append(out, b.subspan(gm_out_));
  }

 private:
  Kernel f_, g_;
  std::size_t fm_, gm_, fx_, fm_out_, gm_out_;
};

class ParNode final : public StreamNode {
 public:
  ParNode(MStream f, MStream g)
      : StreamNode(cat(f.mem_in(), g.mem_in()), cat(f.mem_out(), g.mem_out()),
                   Kernel(std::make_shared<ParNow>(f, g)), TypeSchedule::concat(f.inputs(), g.inputs()),
                   TypeSchedule::concat(f.outputs(), g.outputs())),
        f_(std::move(f)),
        g_(std::move(g)) {}

 protected:
  MStream make_later() const override { return MStream(std::make_shared<ParNode>(f_.later(), g_.later())); }

 private:
  MStream f_, g_;
};

// ---- delay ---------------------------------------------------------------

class DelayNode final : public StreamNode {
 public:
  DelayNode(MStream f, TypeSchedule in, TypeSchedule out)
      : StreamNode({}, {}, trivial(in.at(0), out.at(0)), in, out), f_(std::move(f)) {}

 protected:
  MStream make_later() const override { return f_; }

 private:
  MStream f_;
};

// ---- feedback ------------------------------------------------------------

// Step 0: the delayed state inputs are unit, so they are synthesized.
class FbkFirstNow final : public KernelImpl {
 public:
  FbkFirstNow(const MStream& f, std::size_t k)
      : KernelImpl("fbk", cat(f.mem_in(), [&] {
                     auto x = f.inputs().at(0);
                     return std::vector<Ty>(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
                   }()),
                   f.now().outputs(), f.now().deterministic()),
        f_(f.now()),
        m_(f.mem_in().size()) {
    for (const auto& t : first(f.inputs().at(0), k)) units_.push_back(unit_value(t));
  }

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    std::vector<Value> buf = expand(in);
    f_.impl().exact(buf, w, emit);
  }
  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    std::vector<Value> buf = expand(in);
    f_.impl().sample(buf, rng, out);
  }

 private:
  std::vector<Value> expand(std::span<const Value> in) const {
    std::vector<Value> buf;
    buf.reserve(in.size() + units_.size());
    append(buf, in.first(m_));
    append(buf, units_);
    append(buf, in.subspan(m_));
    return buf;
  }
  Kernel f_;
  std::size_t m_;
  std::vector<Value> units_;
};

// Later steps: the previous state is part of the memory. The inner kernel's
// input layout [M, S_prev, X] already matches [memory, inputs].
class FbkCarryNode final : public StreamNode {
 public:
  FbkCarryNode(MStream g, std::size_t k)
      : StreamNode(cat(g.mem_in(), first(g.inputs().at(0), k)), cat(g.mem_out(), first(g.outputs().at(0), k)),
                   g.now(), TypeSchedule::slice(g.inputs(), k, g.inputs().size() - k),
                   TypeSchedule::slice(g.outputs(), k, g.outputs().size() - k)),
        g_(std::move(g)),
        k_(k) {}

 protected:
  MStream make_later() const override { return MStream(std::make_shared<FbkCarryNode>(g_.later(), k_)); }

 private:
  MStream g_;
  std::size_t k_;
};

class FbkFirstNode final : public StreamNode {
 public:
  FbkFirstNode(MStream f, std::size_t k)
      : StreamNode(f.mem_in(), cat(f.mem_out(), first(f.outputs().at(0), k)),
                   Kernel(std::make_shared<FbkFirstNow>(f, k)),
                   TypeSchedule::slice(f.inputs(), k, f.inputs().size() - k),
                   TypeSchedule::slice(f.outputs(), k, f.outputs().size() - k)),
        f_(std::move(f)),
        k_(k) {}

 protected:
  MStream make_later() const override { return MStream(std::make_shared<FbkCarryNode>(f_.later(), k_)); }

 private:
  MStream f_;
  std::size_t k_;
};

bool unit_shaped(const Ty& t) {
  if (t.kind() == Ty::Kind::Unit) return true;
  if (t.kind() != Ty::Kind::Prod) return false;
  for (const auto& i : t.items())
    if (!unit_shaped(i)) return false;
  return true;
}

// ---- fby -----------------------------------------------------------------

Value fby_select(const Ty& t, std::size_t step, const Value& a, const Value& b) {
  if (t.kind() == Ty::Kind::Prod) {
    auto xs = a.as_tuple();
    auto ys = b.as_tuple();
    std::vector<Value> r;
    r.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) r.push_back(fby_select(t.items()[i], step, xs[i], ys[i]));
    return Value::tuple(std::move(r));
  }
  return step <= static_cast<std::size_t>(t.delay_depth()) ? a : b;
}

}  // namespace

MStream lift_sequence(KernelFamily family, TypeSchedule in, TypeSchedule out) {
  return MStream(std::make_shared<LiftNode>(std::move(family), std::move(in), std::move(out), 0));
}

MStream lift_constant(const Kernel& k) {
  return lift_sequence(KernelFamily::constant(k), TypeSchedule::constant(k.inputs()),
                       TypeSchedule::constant(k.outputs()));
}

MStream stream_structural(Structural kind, TypeSchedule sched) {
  auto s = sched;
  auto fam = KernelFamily::generator([kind, s](std::size_t t) { return structural(kind, s.at(t)); });
  TypeSchedule out = sched;
  switch (kind) {
    case Structural::Identity:
      break;
    case Structural::Copy:
      out = TypeSchedule::concat(sched, sched);
      break;
    case Structural::Discard:
      out = TypeSchedule::constant({});
      break;
    case Structural::Symmetry:
      out = TypeSchedule::concat(TypeSchedule::slice(sched, 1, sched.size() - 1), TypeSchedule::slice(sched, 0, 1));
      break;
  }
  return lift_sequence(std::move(fam), std::move(sched), std::move(out));
}

MStream stream_identity(TypeSchedule sched) { return stream_structural(Structural::Identity, std::move(sched)); }

MStream stream_wiring(TypeSchedule in, std::vector<std::size_t> sources) {
  TypeSchedule out = TypeSchedule::constant({});
  for (auto s : sources) {
    if (s >= in.size()) throw SignatureMismatch("wiring source " + std::to_string(s) + " out of range");
    out = TypeSchedule::concat(out, TypeSchedule::slice(in, s, 1));
  }
  auto fam = KernelFamily::generator([in, sources](std::size_t t) { return wiring(in.at(t), sources); });
  return lift_sequence(std::move(fam), std::move(in), std::move(out));
}

MStream seq(const MStream& f, const MStream& g) {
  if (!f.outputs().matches(g.inputs()))
    throw SignatureMismatch("cannot compose streams: outputs " + f.outputs().str() + " vs inputs " +
                            g.inputs().str());
  return MStream(std::make_shared<SeqNode>(f, g));
}

MStream par(const MStream& f, const MStream& g) { return MStream(std::make_shared<ParNode>(f, g)); }

MStream delay(const MStream& f) {
  if (!f.mem_in().empty()) throw SignatureMismatch("delay needs a stream with no incoming memory");
  auto in = TypeSchedule::delayed(f.inputs());
  auto out = TypeSchedule::delayed(f.outputs());
  return MStream(std::make_shared<DelayNode>(f, std::move(in), std::move(out)));
}

MStream delay(const MStream& f, int times) {
  MStream r = f;
  for (int i = 0; i < times; ++i) r = delay(r);
  return r;
}

MStream feedback(const MStream& f, std::size_t state_wires) {
  const std::size_t k = state_wires;
  if (f.inputs().size() < k || f.outputs().size() < k)
    throw SignatureMismatch("feedback over " + std::to_string(k) + " wires needs at least that many inputs and outputs");
  auto s = TypeSchedule::slice(f.outputs(), 0, k);
  auto ds = TypeSchedule::slice(f.inputs(), 0, k);
  for (const auto& t : ds.at(0))
    if (!unit_shaped(t))
      throw SignatureMismatch("feedback state input at step 0 is " + t.str() + ", expected unit");
  if (!TypeSchedule::delayed(s).matches(ds))
    throw SignatureMismatch("feedback state mismatch: inputs " + ds.str() + " are not the delay of outputs " +
                            s.str());
  return MStream(std::make_shared<FbkFirstNode>(f, k));
}

MStream fby(const Ty& t) {
  const Ty tn = t.normalized();
  const Ty dt = Ty::delay(t);
  auto fam = KernelFamily::generator([tn, t, dt](std::size_t step) {
    return Kernel::det("fby", {t.at(step), dt.at(step)}, {t.at(step)},
                       [tn, step](std::span<const Value> in) {
                         return std::vector<Value>{fby_select(tn, step, in[0], in[1])};
                       });
  });
  return lift_sequence(std::move(fam), TypeSchedule::constant({t, dt}), TypeSchedule::constant({t}));
}

MStream wait(const TypeSchedule& x) {
  const std::size_t n = x.size();
  auto dx = TypeSchedule::delayed(x);
  auto in = TypeSchedule::concat(dx, x);
  auto out = TypeSchedule::concat(x, dx);
  auto fam = KernelFamily::generator([dx, x](std::size_t t) { return symmetry(dx.at(t), x.at(t)); });
  return feedback(lift_sequence(std::move(fam), std::move(in), std::move(out)), n);
}

MStream wait(const Ty& t) { return wait(TypeSchedule::constant({t})); }

std::vector<StepKernel> unroll(const MStream& f, std::size_t n) {
  std::vector<StepKernel> r;
  r.reserve(n + 1);
  const MStream* s = &f;
  for (std::size_t t = 0;; ++t) {
    r.push_back({s->now(), s->mem_in(), s->mem_out(), s->inputs().at(0), s->outputs().at(0)});
    if (t == n) break;
    s = &s->later();
  }
  return r;
}

std::vector<std::vector<Value>> run_sample(const MStream& f, const std::vector<std::vector<Value>>& inputs,
                                           std::size_t steps, Rng& rng) {
  if (!inputs.empty() && inputs.size() < steps)
    throw IllTyped("run needs " + std::to_string(steps) + " input steps, got " + std::to_string(inputs.size()));
  std::vector<std::vector<Value>> result;
  result.reserve(steps);
  std::vector<Value> mem, buf, out;
  const MStream* s = &f;
  for (std::size_t t = 0; t < steps; ++t) {
    if (t > 0) s = &s->later();
    buf = mem;
    if (!inputs.empty()) buf.insert(buf.end(), inputs[t].begin(), inputs[t].end());
    out = apply_sample(s->now(), buf, rng);
    const std::size_t m = s->mem_out().size();
    mem.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(m));
    result.emplace_back(out.begin() + static_cast<std::ptrdiff_t>(m), out.end());
  }
  return result;
}

}  // namespace mstream
