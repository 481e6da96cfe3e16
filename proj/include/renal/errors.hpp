#pragma once

#include <stdexcept>
#include <string>

namespace renal {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a precondition (bad dimensions,
// alpha outside (0,1), non-finite input, unstable process parameters).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// The data is too short or too thin for the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Every candidate discretization was filtered out, or the data collapses
// to a single point; the caller should relax the configuration.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss. Carries the epoch at which the
// divergence was detected.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int epoch_index)
        : Error(msg), epoch(epoch_index) {}
    int epoch;
};

// Malformed file content; line is 1-based, 0 means "not line-specific".
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line_number = 0)
        : Error(msg), line(line_number) {}
    long line;
};

// Invalid experiment or CLI configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem failure (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

// An internal invariant failed, e.g. a thinning bound was exceeded.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace renal
