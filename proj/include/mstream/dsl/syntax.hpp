#pragma once

#include <string>
#include <string_view>

#include "mstream/dsl/ast.hpp"

namespace mstream::dsl {

/// Parses a whole program. Throws ParseError with the offending position.
Program parse(std::string_view source);
/// Parses a single term (used by tests and the round-trip check).
TermPtr parse_term(std::string_view source);

/// Normal-form rendering: one declaration per line, minimal parentheses.
/// parse(print(p)) is structurally equal to p.
std::string print(const Program& p);
std::string print(const Term& t);
std::string print(const TypeExpr& t);

}  // namespace mstream::dsl
