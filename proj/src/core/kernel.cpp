#include "mstream/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "mstream/error.hpp"

namespace mstream {

namespace {

void check_inputs(const Kernel& k, std::span<const Value> in) {
  const auto& tys = k.inputs();
  if (in.size() != tys.size())
    throw IllTyped("kernel " + k.name() + " expects " + std::to_string(tys.size()) +
                   " inputs, got " + std::to_string(in.size()));
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!tys[i].admits(in[i]))
      throw IllTyped("kernel " + k.name() + ": input " + std::to_string(i) + " value " +
                     in[i].str() + " does not inhabit " + tys[i].str());
}

void check_outputs(const std::string& name, const std::vector<Ty>& tys, std::span<const Value> out) {
  if (out.size() != tys.size())
    throw IllTyped("kernel " + name + " produced " + std::to_string(out.size()) +
                   " outputs, declared " + std::to_string(tys.size()));
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!tys[i].admits(out[i]))
      throw IllTyped("kernel " + name + ": output " + std::to_string(i) + " value " +
                     out[i].str() + " does not inhabit " + tys[i].str());
}

class DetFnKernel final : public KernelImpl {
 public:
  DetFnKernel(std::string name, std::vector<Ty> in, std::vector<Ty> out, Kernel::DetFn fn)
      : KernelImpl(std::move(name), std::move(in), std::move(out), true), fn_(std::move(fn)) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    auto out = run(in);
    emit(out, w);
  }
  void sample(std::span<const Value> in, Rng&, std::vector<Value>& out) const override {
    auto r = run(in);
    out.insert(out.end(), r.begin(), r.end());
  }

 private:
  std::vector<Value> run(std::span<const Value> in) const {
    auto out = fn_(in);
    check_outputs(name(), outputs(), out);
    return out;
  }
  Kernel::DetFn fn_;
};

class StochFnKernel final : public KernelImpl {
 public:
  StochFnKernel(std::string name, std::vector<Ty> in, std::vector<Ty> out, Kernel::StochFn fn)
      : KernelImpl(std::move(name), std::move(in), std::move(out), false), fn_(std::move(fn)) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    const Dist d = run(in);
    for (const auto& [v, p] : d) emit(v.as_tuple(), w * p);
  }
  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    const Value v = mstream::sample(run(in), rng);
    auto items = v.as_tuple();
    out.insert(out.end(), items.begin(), items.end());
  }

 private:
  Dist run(std::span<const Value> in) const {
    Dist d = fn_(in);
    for (const auto& [v, p] : d) {
      if (!v.is_tuple())
        throw IllTyped("kernel " + name() + " produced non-tuple outcome " + v.str());
      check_outputs(name(), outputs(), v.as_tuple());
    }
    return d;
  }
  Kernel::StochFn fn_;
};

class ComposeKernel final : public KernelImpl {
 public:
  ComposeKernel(Kernel f, Kernel g)
      : KernelImpl(f.name() + ";" + g.name(), f.inputs(), g.outputs(),
                   f.deterministic() && g.deterministic()),
        f_(std::move(f)),
        g_(std::move(g)) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    const KernelImpl& g = g_.impl();
    f_.impl().exact(in, w, [&](std::span<const Value> mid, const Rat& w1) { g.exact(mid, w1, emit); });
  }
  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    std::vector<Value> mid;
    f_.impl().sample(in, rng, mid);
    g_.impl().sample(mid, rng, out);
  }

 private:
  Kernel f_, g_;
};

std::vector<Ty> concat(const std::vector<Ty>& a, const std::vector<Ty>& b) {
  std::vector<Ty> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

class TensorKernel final : public KernelImpl {
 public:
  TensorKernel(Kernel f, Kernel g)
      : KernelImpl("(" + f.name() + "*" + g.name() + ")", concat(f.inputs(), g.inputs()),
                   concat(f.outputs(), g.outputs()), f.deterministic() && g.deterministic()),
        f_(std::move(f)),
        g_(std::move(g)) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    const std::size_t nf = f_.inputs().size();
    const KernelImpl& g = g_.impl();
    std::vector<Value> buf;
    f_.impl().exact(in.first(nf), w, [&](std::span<const Value> a, const Rat& w1) {
      g.exact(in.subspan(nf), w1, [&](std::span<const Value> b, const Rat& w2) {
        buf.assign(a.begin(), a.end());
        buf.insert(buf.end(), b.begin(), b.end());
        emit(buf, w2);
      });
    });
  }
  void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const override {
    const std::size_t nf = f_.inputs().size();
    f_.impl().sample(in.first(nf), rng, out);
    g_.impl().sample(in.subspan(nf), rng, out);
  }

 private:
  Kernel f_, g_;
};

class WiringKernel final : public KernelImpl {
 public:
  WiringKernel(std::string name, std::vector<Ty> in, std::vector<Ty> out,
               std::vector<std::size_t> sources)
      : KernelImpl(std::move(name), std::move(in), std::move(out), true),
        sources_(std::move(sources)) {}

  void exact(std::span<const Value> in, const Rat& w, Emit emit) const override {
    std::vector<Value> out;
    out.reserve(sources_.size());
    for (auto s : sources_) out.push_back(in[s]);
    emit(out, w);
  }
  void sample(std::span<const Value> in, Rng&, std::vector<Value>& out) const override {
    for (auto s : sources_) out.push_back(in[s]);
  }

 private:
  std::vector<std::size_t> sources_;
};

class ConstKernel final : public KernelImpl {
 public:
  ConstKernel(std::string name, std::vector<Ty> in, std::vector<Value> values, std::vector<Ty> out)
      : KernelImpl(std::move(name), std::move(in), std::move(out), true), values_(std::move(values)) {}

  void exact(std::span<const Value>, const Rat& w, Emit emit) const override { emit(values_, w); }
  void sample(std::span<const Value>, Rng&, std::vector<Value>& out) const override {
    out.insert(out.end(), values_.begin(), values_.end());
  }

 private:
  std::vector<Value> values_;
};

}  // namespace

Kernel Kernel::det(std::string name, std::vector<Ty> in, std::vector<Ty> out, DetFn fn) {
  return Kernel(std::make_shared<DetFnKernel>(std::move(name), std::move(in), std::move(out),
                                              std::move(fn)));
}

Kernel Kernel::stoch(std::string name, std::vector<Ty> in, std::vector<Ty> out, StochFn fn) {
  return Kernel(std::make_shared<StochFnKernel>(std::move(name), std::move(in), std::move(out),
                                                std::move(fn)));
}

Dist apply_exact(const Kernel& k, std::span<const Value> input) {
  check_inputs(k, input);
  DistBuilder b;
  k.impl().exact(input, Rat(1), [&](std::span<const Value> out, const Rat& w) { b.add(pack(out), w); });
  return std::move(b).build();
}

std::vector<Value> apply_sample(const Kernel& k, std::span<const Value> input, Rng& rng) {
  check_inputs(k, input);
  std::vector<Value> out;
  k.impl().sample(input, rng, out);
  return out;
}

std::vector<Value> apply_det(const Kernel& k, std::span<const Value> input) {
  if (!k.deterministic()) throw Error("kernel " + k.name() + " is stochastic");
  Rng unused(0);
  return apply_sample(k, input, unused);
}

Kernel compose(const Kernel& f, const Kernel& g) {
  if (!same_shape(f.outputs(), g.inputs()))
    throw SignatureMismatch("cannot compose " + f.name() + " : " + str(f.outputs()) + " with " +
                            g.name() + " : " + str(g.inputs()));
  return Kernel(std::make_shared<ComposeKernel>(f, g));
}

Kernel tensor(const Kernel& f, const Kernel& g) {
  return Kernel(std::make_shared<TensorKernel>(f, g));
}

Kernel wiring(std::vector<Ty> in, std::vector<std::size_t> sources) {
  std::vector<Ty> out;
  out.reserve(sources.size());
  std::ostringstream name;
  name << "wire[";
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (sources[j] >= in.size())
      throw SignatureMismatch("wiring source " + std::to_string(sources[j]) + " out of range");
    out.push_back(in[sources[j]]);
    name << (j ? "," : "") << sources[j];
  }
  name << "]";
  return Kernel(std::make_shared<WiringKernel>(name.str(), std::move(in), std::move(out),
                                               std::move(sources)));
}

Kernel symmetry(std::vector<Ty> a, std::vector<Ty> b) {
  std::vector<std::size_t> src;
  for (std::size_t i = 0; i < b.size(); ++i) src.push_back(a.size() + i);
  for (std::size_t i = 0; i < a.size(); ++i) src.push_back(i);
  return Kernel(std::make_shared<WiringKernel>("swap", concat(a, b), concat(b, a), std::move(src)));
}

Kernel structural(Structural kind, std::vector<Ty> types) {
  const std::size_t n = types.size();
  std::vector<std::size_t> src;
  std::string name;
  switch (kind) {
    case Structural::Identity:
      for (std::size_t i = 0; i < n; ++i) src.push_back(i);
      name = "id";
      break;
    case Structural::Symmetry: {
      if (n == 0) throw SignatureMismatch("symmetry needs at least one wire");
      std::vector<Ty> a(types.begin(), types.begin() + 1);
      std::vector<Ty> b(types.begin() + 1, types.end());
      return symmetry(std::move(a), std::move(b));
    }
    case Structural::Copy:
      for (int rep = 0; rep < 2; ++rep)
        for (std::size_t i = 0; i < n; ++i) src.push_back(i);
      name = "copy";
      break;
    case Structural::Discard:
      name = "discard";
      break;
  }
  std::vector<Ty> out;
  for (auto s : src) out.push_back(types[s]);
  return Kernel(std::make_shared<WiringKernel>(name, std::move(types), std::move(out),
                                               std::move(src)));
}

Kernel constant(Value v, Ty ty) {
  if (!ty.admits(v)) throw IllTyped("constant " + v.str() + " does not inhabit " + ty.str());
  const std::string name = v.str();
  return Kernel(std::make_shared<ConstKernel>(name, std::vector<Ty>{}, std::vector<Value>{std::move(v)},
                                              std::vector<Ty>{std::move(ty)}));
}

Value unit_value(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Unit:
      return Value::unit();
    case Ty::Kind::Prod: {
      std::vector<Value> items;
      for (const auto& i : t.items()) items.push_back(unit_value(i));
      return Value::tuple(std::move(items));
    }
    default:
      throw SignatureMismatch("type " + t.str() + " is not unit-shaped");
  }
}

Kernel trivial(std::vector<Ty> in, std::vector<Ty> out) {
  for (const auto& t : in) unit_value(t);
  std::vector<Value> values;
  for (const auto& t : out) values.push_back(unit_value(t));
  return Kernel(std::make_shared<ConstKernel>("unit", std::move(in), std::move(values), std::move(out)));
}

}  // namespace mstream
