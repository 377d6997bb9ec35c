#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mstream/dist.hpp"
#include "mstream/function_ref.hpp"
#include "mstream/rng.hpp"
#include "mstream/ty.hpp"
#include "mstream/value.hpp"

namespace mstream {

/// Receives one weighted outcome (the output wires) during exact evaluation.
using Emit = FunctionRef<void(std::span<const Value>, const Rat&)>;

/// One-step process from a list of input wires to a list of output wires.
///
/// Exact evaluation is continuation-passing: `exact` calls `emit` once per
/// outcome path with the path weight multiplied into `w`. The same output can
/// be emitted along several paths; callers merge them. Implementations may
/// assume the input arity matches `inputs()`.
class KernelImpl {
 public:
  KernelImpl(std::string name, std::vector<Ty> inputs, std::vector<Ty> outputs, bool deterministic)
      : name_(std::move(name)),
        inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        deterministic_(deterministic) {}
  virtual ~KernelImpl() = default;

  const std::string& name() const { return name_; }
  const std::vector<Ty>& inputs() const { return inputs_; }
  const std::vector<Ty>& outputs() const { return outputs_; }
  bool deterministic() const { return deterministic_; }

  virtual void exact(std::span<const Value> in, const Rat& w, Emit emit) const = 0;
  /// Appends the drawn outputs to `out`. Deterministic kernels ignore `rng`.
  virtual void sample(std::span<const Value> in, Rng& rng, std::vector<Value>& out) const = 0;

 private:
  std::string name_;
  std::vector<Ty> inputs_;
  std::vector<Ty> outputs_;
  bool deterministic_;
};

/// Shared immutable handle to a kernel. Deterministic kernels are plain
/// functions; stochastic ones map an input tuple to a distribution over
/// output tuples (the Kleisli category of the finite distribution monad).
class Kernel {
 public:
  using DetFn = std::function<std::vector<Value>(std::span<const Value>)>;
  /// Returns a distribution over tuples of output values.
  using StochFn = std::function<Dist(std::span<const Value>)>;

  explicit Kernel(std::shared_ptr<const KernelImpl> impl) : impl_(std::move(impl)) {}

  static Kernel det(std::string name, std::vector<Ty> in, std::vector<Ty> out, DetFn fn);
  static Kernel stoch(std::string name, std::vector<Ty> in, std::vector<Ty> out, StochFn fn);

  const std::string& name() const { return impl_->name(); }
  const std::vector<Ty>& inputs() const { return impl_->inputs(); }
  const std::vector<Ty>& outputs() const { return impl_->outputs(); }
  bool deterministic() const { return impl_->deterministic(); }
  const KernelImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const KernelImpl> impl_;
};

/// Full output distribution (over tuples of output wires). Checks that the
/// input is well typed; deterministic kernels yield a point mass.
Dist apply_exact(const Kernel& k, std::span<const Value> input);
/// One draw of the output wires; checks that the input is well typed.
std::vector<Value> apply_sample(const Kernel& k, std::span<const Value> input, Rng& rng);
/// Runs a deterministic kernel; throws when the kernel is stochastic.
std::vector<Value> apply_det(const Kernel& k, std::span<const Value> input);

/// (f;g)(z|x) = sum_y g(z|y) f(y|x). Requires f's outputs to match g's inputs.
Kernel compose(const Kernel& f, const Kernel& g);
/// Componentwise; stochastic parts are independent.
Kernel tensor(const Kernel& f, const Kernel& g);

enum class Structural { Identity, Symmetry, Copy, Discard };

/// Identity, copy and discard act on the whole block `types`; symmetry
/// swaps the first wire with the rest (use `symmetry` for general blocks).
Kernel structural(Structural kind, std::vector<Ty> types);
/// sigma_{A,B}: A ++ B -> B ++ A.
Kernel symmetry(std::vector<Ty> a, std::vector<Ty> b);
/// Deterministic rewiring: output j is input `sources[j]`. Covers
/// permutation, duplication and erasure in one kernel.
Kernel wiring(std::vector<Ty> in, std::vector<std::size_t> sources);
/// Emits a constant value of type `ty` from no inputs.
Kernel constant(Value v, Ty ty);
/// Unit-shaped inputs to unit-shaped outputs; the step-0 action of a delayed stream.
Kernel trivial(std::vector<Ty> in, std::vector<Ty> out);

/// The unique inhabitant of a unit-shaped type (Unit or products of Unit).
Value unit_value(const Ty& t);

}  // namespace mstream
