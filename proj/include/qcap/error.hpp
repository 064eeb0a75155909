#pragma once

#include <stdexcept>
#include <string>

namespace qcap {

// Base for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller input: dimension mismatch, invalid probabilities, index out of
// range, malformed specs.
struct InvalidArgument : Error {
  using Error::Error;
};

// A problem dimension exceeds the configured cap.
struct CapExceeded : Error {
  using Error::Error;
};

// A quantity that must hold by construction does not (non-Hermitian state,
// broken Choi marginal, non-finite objective, ...).
struct InvariantViolation : Error {
  using Error::Error;
};

}  // namespace qcap
