#pragma once

#include <iosfwd>

namespace mstream::cli {

enum Exit : int {
  kOk = 0,
  kParseError = 1,
  kTypeError = 2,
  kSupportOverflow = 3,
  kDiffer = 4,  // equiv found a difference, or causal found a violation
  kLawFailure = 5,
  kUsage = 64,
  kNoInput = 65,   // unreadable file or unknown stream name
  kEvalError = 66  // missing finite domain, ill-typed input, other runtime error
};

/// Runs one command line. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mstream::cli
