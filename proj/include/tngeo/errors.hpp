#ifndef TNGEO_ERRORS_HPP
#define TNGEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tngeo {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidPermutation : Error {
    using Error::Error;
};

struct InvalidBipartition : Error {
    using Error::Error;
};

struct InvalidSpec : Error {
    using Error::Error;
};

struct NotATreeBond : Error {
    using Error::Error;
};

struct NotATree : Error {
    using Error::Error;
};

struct Disconnected : Error {
    using Error::Error;
};

struct TargetTooLarge : Error {
    using Error::Error;
};

struct DegenerateState : Error {
    using Error::Error;
};

struct NoSuchNode : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace tngeo

#endif // TNGEO_ERRORS_HPP
