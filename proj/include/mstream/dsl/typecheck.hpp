#pragma once

#include <string>
#include <vector>

#include "mstream/dsl/ast.hpp"
#include "mstream/ty.hpp"

namespace mstream::dsl {

enum class Mode { Deterministic, Stochastic };

/// How `wait(x)` reaches the stream engine: as the wait primitive, or
/// rewritten to `fbk y. [x, y]` before checking.
enum class WaitRoute { Primitive, Feedback };

/// Self-reference `M = x(M)` becomes `M = fbk m. copy(x(m))`. References to
/// later definitions are rejected; a cycle is reported as mutual recursion.
Program desugar(const Program& p, WaitRoute route = WaitRoute::Primitive);

/// Stochastic iff some definition mentions a stochastic builtin.
Mode infer_mode(const Program& p);

struct TypedInput {
  std::string name;
  Ty type;  // declared, finite domains kept
};

struct TypedDef {
  std::string name;
  Ty type;  // domains dropped
};

/// A checked program: every term carries `ty`, literals and generators
/// carry the delay depth at which they run.
struct TypedProgram {
  Program program;
  Mode mode = Mode::Deterministic;
  std::vector<TypedInput> inputs;
  std::vector<TypedDef> defs;

  const TypedDef* find(const std::string& name) const;
};

/// Checks a desugared program. Throws TypeError.
TypedProgram typecheck(Program p);

/// Surface rendering of a type: `Int`, `@Set`, `(Int * @Int)`, domain names kept.
std::string surface(const Ty& t);

}  // namespace mstream::dsl
