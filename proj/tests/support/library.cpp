#include "support/library.hpp"

namespace mstream::testlib {

namespace {

const Ty kInt = Ty::integer();
const Ty kDInt = Ty::delay(Ty::integer());

TypeSchedule one(const Ty& t) { return TypeSchedule::constant({t}); }

MStream lift(const Kernel& k) { return lift_constant(k); }

}  // namespace

Kernel add_kernel() {
  return Kernel::det("add", {kInt, kInt}, {kInt}, [](std::span<const Value> in) {
    return std::vector<Value>{Value::integer(in[0].as_int() + in[1].as_int())};
  });
}

Kernel neg_kernel() {
  return Kernel::det("neg", {kInt}, {kInt},
                     [](std::span<const Value> in) { return std::vector<Value>{Value::integer(-in[0].as_int())}; });
}

Kernel offset_kernel(std::int64_t k) {
  return Kernel::det("offset", {kInt}, {kInt}, [k](std::span<const Value> in) {
    return std::vector<Value>{Value::integer(in[0].as_int() + k)};
  });
}

Kernel unif_kernel() {
  return Kernel::stoch("unif", {}, {kInt}, [](std::span<const Value>) {
    const Value pts[] = {Value::tuple({Value::integer(-1)}), Value::tuple({Value::integer(1)})};
    return Dist::uniform(pts);
  });
}

MStream fib_stream() {
  auto copy_d = stream_structural(Structural::Copy, one(kDInt));
  auto one_later = delay(lift(constant(Value::integer(1), kInt)));
  auto prev = par(stream_identity(one(kDInt)), par(one_later, wait(kDInt)));
  auto shifted = par(stream_identity(one(kDInt)), fby(kDInt));
  auto sum = delay(lift(add_kernel()));
  auto start = par(lift(constant(Value::integer(0), kInt)), stream_identity(one(kDInt)));
  auto body = seq(seq(seq(seq(seq(seq(copy_d, prev), shifted), sum), start), fby(kInt)),
                  stream_structural(Structural::Copy, one(kInt)));
  return feedback(body, 1);
}

MStream walk_stream() {
  auto step = par(delay(lift(unif_kernel())), stream_identity(one(kDInt)));
  auto sum = delay(lift(add_kernel()));
  auto start = par(lift(constant(Value::integer(0), kInt)), stream_identity(one(kDInt)));
  auto body = seq(seq(seq(seq(step, sum), start), fby(kInt)), stream_structural(Structural::Copy, one(kInt)));
  return feedback(body, 1);
}

MStream store_first(const Ty& t) {
  // State wire first, input second; the new state is the input at step 0 and
  // the old state afterwards.
  auto swap = stream_wiring(TypeSchedule::constant({Ty::delay(t), t}), {1, 0});
  return feedback(seq(swap, fby(t)), 1);
}

MStream silent_walk() { return seq(walk_stream(), stream_structural(Structural::Discard, one(kInt))); }

MStream nothing() { return stream_identity(TypeSchedule::constant({})); }

std::vector<Step> PeekingProcess::candidates(std::size_t) const {
  return {{Value::integer(0)}, {Value::integer(1)}};
}

Dist PeekingProcess::joint(const History& h) const {
  std::vector<Value> steps;
  for (std::size_t t = 0; t < h.size(); ++t)
    steps.push_back(Value::tuple({t + 1 < h.size() ? h[t + 1][0] : Value::integer(0)}));
  return Dist::dirac(Value::tuple(std::move(steps)));
}

}  // namespace mstream::testlib
