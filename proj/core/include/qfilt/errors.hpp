#pragma once

#include <stdexcept>
#include <string>

namespace qfilt {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An input fails a structural precondition (non-Hermitian matrix, value out
// of range, mismatched sizes, malformed file, ...).
struct ValidationError : Error {
  using Error::Error;
};

// A dimension or qubit budget was exceeded.  The message names the offending
// sizes so the caller can shrink the request.
struct CapacityError : Error {
  using Error::Error;
};

// An internally computed quantity landed outside its numerically allowed
// range (probability beyond [0,1], non-real expectation of a Hermitian
// operator, ...).  Indicates accumulated rounding or a corrupted input.
struct NumericsError : Error {
  using Error::Error;
};

// Amplification was requested for a state with no overlap on the target
// subspace; the rotation angle is undefined.
struct UndefinedAmplificationError : Error {
  using Error::Error;
};

}  // namespace qfilt
