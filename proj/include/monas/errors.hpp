#pragma once

#include <stdexcept>
#include <string>

namespace monas {

// Base class for all errors raised by the library. CLI maps ConfigError to
// exit code 2 and everything else to 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Genome / encoding
struct MalformedEncoding : Error {
    using Error::Error;
};
struct SpaceMismatch : Error {
    using Error::Error;
};

// Ledger
struct NonMonotoneEpoch : Error {
    using Error::Error;
};
struct EmptyHistory : Error {
    using Error::Error;
};
struct InsufficientHistory : Error {
    using Error::Error;
};

// Selection
struct ShapeMismatch : Error {
    using Error::Error;
};
struct BadK : Error {
    using Error::Error;
};

// Training
struct NonFiniteLoss : Error {
    using Error::Error;
};

// Harness
struct SeedMismatch : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};

}  // namespace monas
