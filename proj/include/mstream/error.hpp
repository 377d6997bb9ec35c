#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mstream {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel or stream signatures do not line up (composition, lifting, feedback).
class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

/// A value does not inhabit the type a kernel or stream expects.
class IllTyped : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration would exceed the configured support cap.
class SupportOverflow : public Error {
 public:
  SupportOverflow(std::size_t limit, std::size_t attempted)
      : Error("support overflow: limit " + std::to_string(limit) + ", attempted " +
              std::to_string(attempted)),
        limit_(limit),
        attempted_(attempted) {}

  std::size_t limit() const { return limit_; }
  std::size_t attempted() const { return attempted_; }

 private:
  std::size_t limit_;
  std::size_t attempted_;
};

/// Exact analysis needs a finite domain that was not declared.
class MissingDomain : public Error {
 public:
  using Error::Error;
};

}  // namespace mstream
