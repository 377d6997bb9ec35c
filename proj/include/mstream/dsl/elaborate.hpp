#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mstream/dsl/typecheck.hpp"
#include "mstream/stream.hpp"

namespace mstream::dsl {

/// Streams for every definition of a checked program. Each stream takes all
/// program inputs in declaration order and has one output wire of the
/// definition's type.
struct Elaborated {
  TypedProgram typed;
  std::map<std::string, MStream> streams;

  /// Throws Error for an unknown name.
  const MStream& at(const std::string& name) const;
};

Elaborated elaborate(const TypedProgram& p);

struct CompileOptions {
  WaitRoute wait = WaitRoute::Primitive;
};

/// parse, desugar, typecheck, elaborate.
Elaborated compile(std::string_view source, CompileOptions opts = {});

}  // namespace mstream::dsl
