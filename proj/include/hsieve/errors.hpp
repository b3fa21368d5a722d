#pragma once

#include <stdexcept>
#include <string>

namespace hsieve {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed group description or argument.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Size caps: group order cap, dense-dimension guard.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (empty register subset, d >= D, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Floating point result could not be certified (rank ambiguity, non-integer
// multiplicity, degenerate eigenvalues after all retries).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The requested construction is not available for this group family.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied action failed its homomorphism/idempotence certification.
class InvalidActionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsieve
