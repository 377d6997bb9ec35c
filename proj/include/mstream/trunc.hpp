#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mstream/dist.hpp"
#include "mstream/stream.hpp"

namespace mstream {

/// One step's input wires, or one history of them (index = step).
using Step = std::vector<Value>;
using History = std::vector<Step>;

/// Where the inputs at each step come from: the finite domains of the
/// stream's input types (default), domains of explicitly given wire types, or
/// one fixed history.
class InputSpec {
 public:
  static InputSpec from_schedule() { return InputSpec(); }
  /// The same wire types at every step (Delay allowed).
  static InputSpec types(std::vector<Ty> wires);
  static InputSpec fixed(History h);

  /// Candidate input tuples at step t for a stream with the given input schedule.
  std::vector<Step> candidates(const TypeSchedule& in, std::size_t t) const;
  bool is_fixed() const { return fixed_.has_value(); }

 private:
  std::optional<std::vector<Ty>> types_;
  std::optional<History> fixed_;
};

/// Output histories are tuples of per-step tuples; input histories likewise.
Value history_value(const History& h);
/// Keeps steps 0..t of every output history in `d` (still tuples of steps).
Dist truncate_history(const Dist& d, std::size_t t);

/// Exact joint output-history distributions at depth n (steps 0..n), one per
/// enumerated input history.
struct JointDist {
  std::size_t depth = 0;
  std::map<Value, Dist> by_input;  // keyed by history_value(input history)

  const Dist& at(const History& h) const;
  bool operator==(const JointDist& o) const { return depth == o.depth && by_input == o.by_input; }
};

/// Reference implementation: every input history is evaluated on its own by
/// threading the distribution over (memory, output history) through the
/// unrolled kernels. Kept for testing and benchmarking.
JointDist proc_semantics_serial(const MStream& f, const InputSpec& spec, std::size_t n);
/// Shares work between histories with a common prefix and fans the prefix
/// tree out over OpenMP threads. Same result as the serial version.
JointDist proc_semantics(const MStream& f, const InputSpec& spec, std::size_t n);

/// Joint output distribution of one fixed input history (steps 0..h.size()-1).
Dist run_exact(const MStream& f, const History& inputs);
/// Per-step output marginals for one fixed input history; only the memory
/// distribution is threaded, so the cost does not grow with history length.
std::vector<Dist> step_marginals(const MStream& f, const History& inputs, std::size_t steps);

/// Anything with per-history joint distributions: the causality check works
/// on this so it can be run against processes that are not streams.
class TruncatedProcess {
 public:
  virtual ~TruncatedProcess() = default;
  virtual std::vector<Step> candidates(std::size_t t) const = 0;
  /// Joint distribution over output histories for steps 0..h.size()-1.
  virtual Dist joint(const History& h) const = 0;
};

std::unique_ptr<TruncatedProcess> as_process(const MStream& f, const InputSpec& spec);

struct CausalityReport {
  bool passed = true;
  std::size_t histories_checked = 0;
  // Witness on failure: the step-t marginal of the full history disagrees
  // with the step-t joint of the prefix.
  std::size_t step = 0;
  History history;
  Dist marginal;
  Dist prefix_joint;

  std::string json() const;
};

/// For every history of length n+1 and every t < n, the steps-0..t marginal
/// of its joint equals the joint of its length-(t+1) prefix.
CausalityReport check_causality(const TruncatedProcess& p, std::size_t n);
CausalityReport check_causality(const MStream& f, const InputSpec& spec, std::size_t n);

struct EquivReport {
  bool equal = true;
  std::size_t step = 0;
  History history;
  Dist left, right;

  std::string json() const;
};

/// Equal iff the joint output distributions agree for every input history up
/// to depth n. On a difference the witness is the earliest step at which any
/// input history tells the streams apart, with one such history.
///
/// Decided without enumerating histories: the weighted memory states of both
/// streams reachable by each (input, output) prefix span a space of dimension
/// at most the number of reachable memories, and the streams agree iff the
/// difference of total masses vanishes on a basis of that space at each step.
EquivReport obs_equiv(const MStream& f, const MStream& g, const InputSpec& spec, std::size_t n);
/// Reference route: compares proc_semantics of both streams history by history.
EquivReport obs_equiv_enumerate(const MStream& f, const MStream& g, const InputSpec& spec, std::size_t n);

/// Outputs of a deterministic stream on an input prefix. Throws Error if a
/// stochastic kernel is reached.
std::vector<Step> causal_eval(const MStream& f, const History& inputs);
/// Steps to run when the stream has no inputs.
std::vector<Step> causal_eval(const MStream& f, std::size_t steps);

}  // namespace mstream
