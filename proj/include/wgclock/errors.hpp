#pragma once

#include <stdexcept>
#include <string>

namespace wgclock {

// Base of every error raised by the library. The C API maps each subclass
// onto a distinct wgc_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physical parameter violates its validity range (E <= 0, J0 <= 0, x < 0 ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// k2 = 0: only reachable with vanishing coupling at zero energy mismatch.
class SingularInput : public Error {
 public:
  using Error::Error;
};

// Observable undefined at the sampled point (wavefunction node or underflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent simulation configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wave packet population reached the hard-wall grid ends.
class BoundaryContact : public Error {
 public:
  using Error::Error;
};

// Adaptive time step collapsed below its floor.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

// An internal consistency identity failed at runtime.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace wgclock
