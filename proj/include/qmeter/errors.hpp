// errors.hpp: exception hierarchy shared by the qmeter library and CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace qmeter {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input: parameters violating invariants, malformed grids, bad delta.
struct InvalidArgument : Error {
    using Error::Error;
};

// Index or step range outside the trajectory.
struct RangeError : Error {
    using Error::Error;
};

// Requested work beyond a configured ceiling (step count, oracle dimension).
struct ResourceLimitError : Error {
    using Error::Error;
};

// A numeric quantity left its mathematical range by more than rounding allows.
struct ConsistencyError : Error {
    using Error::Error;
};

// Volume series that grows without ever shrinking; N+/N- undefined.
struct DegenerateDynamicsError : Error {
    using Error::Error;
};

// Truncated Fock evolution lost more norm than the acceptance bound.
struct TruncationError : Error {
    using Error::Error;
};

}  // namespace qmeter
