#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mstream/dist.hpp"
#include "mstream/value.hpp"

namespace mstream {

/// JSON renderings shared by reports and the command line. Integers are
/// written digit for digit at any size; unit is null; sets and tuples are
/// arrays; rationals are "num/den" strings.
std::string to_json(const Value& v);
std::string to_json(const std::vector<Value>& wires);
/// `[{"value": v, "p": "num/den"}, ...]` in support order.
std::string to_json(const Dist& d);
std::string json_quote(std::string_view s);

}  // namespace mstream
