#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mstream/kernel.hpp"
#include "mstream/rng.hpp"
#include "mstream/stream.hpp"

namespace mstream {

/// Integer type over {0,1} or {0,1,2}.
Ty random_base(Rng& rng);
/// Two-element integer type {0,1}.
Ty bit_type();

/// Stochastic kernel with, per input tuple, a support of 1 to 3 outputs and
/// weights whose common denominator is at most 8. Needs finite domains.
Kernel random_kernel(Rng& rng, const std::vector<Ty>& in, const std::vector<Ty>& out, std::string name = "rk");
/// Memoryless stream with an independent random kernel at every step. The
/// kernel of step t depends only on (seed, t), so the stream replays.
MStream random_lift(std::uint64_t seed, TypeSchedule in, TypeSchedule out);
/// Random composite of lifts, sequencing, tensoring and feedback. `size`
/// bounds the nesting depth.
MStream random_stream(Rng& rng, const TypeSchedule& in, const TypeSchedule& out, int size);

struct LawResult {
  std::string law;
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  bool passed = true;
  std::string detail;  // EquivReport JSON on failure
};

struct LawReport {
  std::vector<LawResult> results;

  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
  /// Checks per law name as (passed, total).
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> tally() const;
  std::string json() const;
};

/// Feedback axioms (tightening, vanishing, joining, strength, sliding): each
/// instance draws fresh random streams and checks all five at `depth`.
/// The plain version fans instances out over OpenMP; `_serial` runs them in order.
LawReport axiom_suite(std::uint64_t seed, std::size_t instances, std::size_t depth);
LawReport axiom_suite_serial(std::uint64_t seed, std::size_t instances, std::size_t depth);

/// Sequential associativity and units, tensor functoriality, associativity
/// and symmetry naturality, delay functoriality.
LawReport category_suite(std::uint64_t seed, std::size_t instances, std::size_t depth);
LawReport category_suite_serial(std::uint64_t seed, std::size_t instances, std::size_t depth);

}  // namespace mstream
