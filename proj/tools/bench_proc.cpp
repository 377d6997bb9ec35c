// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "mstream/laws.hpp"
#include "mstream/trunc.hpp"
#include "support/library.hpp"

using namespace mstream;

namespace {

MStream bench_stream() {
  Rng rng(31);
  const auto bits = TypeSchedule::constant({bit_type()});
  return random_stream(rng, bits, bits, 3);
}

template <JointDist (*Semantics)(const MStream&, const InputSpec&, std::size_t)>
void BM_proc(benchmark::State& state) {
  const MStream f = bench_stream();
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Semantics(f, InputSpec::from_schedule(), depth));
}

template <JointDist (*Semantics)(const MStream&, const InputSpec&, std::size_t)>
void BM_walk(benchmark::State& state) {
  const MStream f = testlib::walk_stream();
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Semantics(f, InputSpec::from_schedule(), depth));
}

template <LawReport (*Suite)(std::uint64_t, std::size_t, std::size_t)>
void BM_suite(benchmark::State& state) {
  const auto instances = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Suite(1, instances, 4));
}

}  // namespace

BENCHMARK(BM_proc<proc_semantics_serial>)->Name("proc/serial")->DenseRange(3, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_proc<proc_semantics>)->Name("proc/parallel")->DenseRange(3, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walk<proc_semantics_serial>)->Name("walk/serial")->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walk<proc_semantics>)->Name("walk/parallel")->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_suite<axiom_suite_serial>)->Name("axioms/serial")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_suite<axiom_suite>)->Name("axioms/parallel")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_suite<category_suite_serial>)->Name("category/serial")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_suite<category_suite>)->Name("category/parallel")->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
