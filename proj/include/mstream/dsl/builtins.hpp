#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mstream/kernel.hpp"
#include "mstream/ty.hpp"

namespace mstream::dsl {

/// A generator of the surface language.
///
/// Ordinary builtins take term arguments of the listed base types and become
/// one kernel. Builtins with `literal_args > 0` take that many integer
/// literals instead, read at compile time. `discard` accepts any type.
struct Builtin {
  std::string name;
  std::vector<Ty::Kind> args;
  Ty::Kind result = Ty::Kind::Int;
  bool stochastic = false;
  bool polymorphic = false;
  std::size_t literal_args = 0;
  /// Returns an empty message when the literal arguments are acceptable.
  std::function<std::string(std::span<const std::int64_t>)> validate;
  std::function<Kernel(std::span<const std::int64_t>)> make;
};

/// nullptr for an unknown name. Operators are looked up as "+", "-", "*".
const Builtin* builtin_lookup(std::string_view name);
/// Every builtin, in a stable order.
const std::vector<Builtin>& builtins();

/// The toggle at the heart of the urn model: n leaves s if present, joins otherwise.
Value move_ball(std::int64_t n, const Value& s);

}  // namespace mstream::dsl
