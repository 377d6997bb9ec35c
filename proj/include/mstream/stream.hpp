#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "mstream/kernel.hpp"
#include "mstream/rng.hpp"
#include "mstream/ty.hpp"

namespace mstream {

/// Step-indexed list of wire types. The wire count is the same at every step;
/// the types may change (a delayed wire is Unit at first). Every schedule is
/// eventually constant, which makes equality decidable.
class TypeSchedule {
 public:
  /// The wire types may contain Delay; step t uses `Ty::at(t)` of each.
  static TypeSchedule constant(std::vector<Ty> tys);
  /// Unit-shaped at step 0, then `inner` shifted by one.
  static TypeSchedule delayed(TypeSchedule inner);
  static TypeSchedule cons(std::vector<Ty> head, TypeSchedule tail);
  static TypeSchedule concat(TypeSchedule a, TypeSchedule b);
  /// Wires [offset, offset + count) of `s`.
  static TypeSchedule slice(TypeSchedule s, std::size_t offset, std::size_t count);

  std::size_t size() const;
  std::vector<Ty> at(std::size_t t) const;
  TypeSchedule tail() const;
  /// First step from which `at` no longer changes.
  std::size_t horizon() const;

  /// Same wire shapes at every step (domain descriptors ignored).
  bool matches(const TypeSchedule& o) const;
  std::string str() const;

  /// Opaque representation; only the factories above create nodes.
  struct Node;
  explicit TypeSchedule(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

/// Step-indexed kernel family for memoryless streams.
class KernelFamily {
 public:
  static KernelFamily constant(Kernel k);
  /// `prefix[t]` for t < prefix.size(), `rest` afterwards.
  static KernelFamily eventually(std::vector<Kernel> prefix, Kernel rest);
  /// Arbitrary generator; called at most once per step of any stream built from it.
  static KernelFamily generator(std::function<Kernel(std::size_t)> fn);

  Kernel at(std::size_t t) const { return (*fn_)(offset_ + t); }
  KernelFamily shifted(std::size_t by) const { return KernelFamily(fn_, offset_ + by); }

 private:
  using Fn = std::function<Kernel(std::size_t)>;
  KernelFamily(std::shared_ptr<const Fn> fn, std::size_t offset) : fn_(std::move(fn)), offset_(offset) {}
  std::shared_ptr<const Fn> fn_;
  std::size_t offset_ = 0;
};

class MStream;

/// One stage of a monoidal stream. `now` maps mem_in ++ inputs.at(0) to
/// mem_out ++ outputs.at(0); `later` continues with mem_in == this mem_out.
class StreamNode {
 public:
  StreamNode(std::vector<Ty> mem_in, std::vector<Ty> mem_out, Kernel now, TypeSchedule in,
             TypeSchedule out);
  virtual ~StreamNode() = default;

  const std::vector<Ty>& mem_in() const { return mem_in_; }
  const std::vector<Ty>& mem_out() const { return mem_out_; }
  const Kernel& now() const { return now_; }
  const TypeSchedule& inputs() const { return in_; }
  const TypeSchedule& outputs() const { return out_; }

  /// Forced at most once, then cached; safe under concurrent readers.
  const MStream& later() const;

 protected:
  virtual MStream make_later() const = 0;

 private:
  std::vector<Ty> mem_in_, mem_out_;
  Kernel now_;
  TypeSchedule in_, out_;
  mutable std::once_flag once_;
  mutable std::unique_ptr<MStream> later_;
};

/// Shared handle to an immutable stream.
class MStream {
 public:
  explicit MStream(std::shared_ptr<const StreamNode> node) : node_(std::move(node)) {}

  const std::vector<Ty>& mem_in() const { return node_->mem_in(); }
  const std::vector<Ty>& mem_out() const { return node_->mem_out(); }
  const Kernel& now() const { return node_->now(); }
  const MStream& later() const { return node_->later(); }
  const TypeSchedule& inputs() const { return node_->inputs(); }
  const TypeSchedule& outputs() const { return node_->outputs(); }
  const StreamNode& node() const { return *node_; }

 private:
  std::shared_ptr<const StreamNode> node_;
};

MStream stream_identity(TypeSchedule sched);
/// Memoryless; applies k at every step.
MStream lift_constant(const Kernel& k);
/// Memoryless; applies family.at(t) at step t. Each step's kernel is checked
/// against the schedules when that step is first forced (step 0 immediately).
MStream lift_sequence(KernelFamily family, TypeSchedule in, TypeSchedule out);
/// Memoryless structural stream (identity, copy, discard, symmetry) on a schedule.
MStream stream_structural(Structural kind, TypeSchedule sched);
/// Memoryless rewiring: output j at every step is input sources[j].
MStream stream_wiring(TypeSchedule in, std::vector<std::size_t> sources);

MStream seq(const MStream& f, const MStream& g);
MStream par(const MStream& f, const MStream& g);
/// Requires an empty incoming memory.
MStream delay(const MStream& f);
MStream delay(const MStream& f, int times);
/// Feeds the first `state_wires` outputs back as the first `state_wires`
/// inputs of the next step; those inputs are unit at step 0.
MStream feedback(const MStream& f, std::size_t state_wires);

/// t (x) @t -> t: the first argument up to t's delay depth, the second after.
MStream fby(const Ty& t);
/// t -> @t, built as feedback over the symmetry.
MStream wait(const Ty& t);
MStream wait(const TypeSchedule& x);

struct StepKernel {
  Kernel kernel;
  std::vector<Ty> mem_in, mem_out;
  std::vector<Ty> inputs, outputs;
};
/// Kernels of steps 0..n with chained memory signatures.
std::vector<StepKernel> unroll(const MStream& f, std::size_t n);

/// Runs `steps` steps drawing from every stochastic kernel. `inputs[t]` holds
/// the input wires of step t; an empty `inputs` means every step has none.
std::vector<std::vector<Value>> run_sample(const MStream& f,
                                           const std::vector<std::vector<Value>>& inputs,
                                           std::size_t steps, Rng& rng);

/// Number of `later` cells forced so far, process-wide. Instrumentation only.
std::size_t forced_laters();

}  // namespace mstream
