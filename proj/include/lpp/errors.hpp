#pragma once

#include <stdexcept>

namespace lpp {

// Bad inputs: violated preconditions, malformed files, non-prime moduli.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured budget (memory, enumeration count, sieve limit) was exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lookup beyond a table limit.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace lpp
