// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace rsl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration file rejected before any computation ran.
struct ConfigError : Error {
    using Error::Error;
};

// A grid or mask violates a structural invariant.
struct InvalidGrid : Error {
    using Error::Error;
};

struct TimeOutOfRange : Error {
    using Error::Error;
};

// HyperbolicScaled queried for eigenvalues without an initial spectrum.
struct UnknownSpectrum : Error {
    using Error::Error;
};

struct StabilityViolation : Error {
    StabilityViolation(const std::string& msg, double t) : Error(msg), time(t) {}
    double time;
};

struct BlowUp : Error {
    BlowUp(const std::string& msg, double t) : Error(msg), time(t) {}
    double time;
};

struct NoConvergence : Error {
    NoConvergence(const std::string& msg, int mode) : Error(msg), mode_index(mode) {}
    int mode_index;
};

struct EmptyInterior : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

}  // namespace rsl
