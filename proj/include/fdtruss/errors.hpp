#pragma once

#include <stdexcept>
#include <string>

namespace fdtruss {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The free-node block of the force-density matrix is singular or too badly
/// conditioned to solve; the force densities describe a mechanism.
struct SingularEquilibrium : Error {
    using Error::Error;
};

/// The reduced stiffness matrix is not positive definite (unstable truss).
struct SingularStiffness : Error {
    using Error::Error;
};

struct ZeroVolume : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct TooFewPoints : Error {
    using Error::Error;
};

struct StartInfeasible : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace fdtruss
