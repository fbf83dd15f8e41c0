#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfield {

// Base class for every error raised by the engine.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |det| below the scale-aware threshold (non-degeneracy requirement, Eq. 7).
struct Degenerate : Error {
    using Error::Error;
};

// Symmetric matrix whose eigen-signature is not (+,-,-,-).
struct WrongSignature : Error {
    using Error::Error;
};

// Evaluation left the real domain (log/sqrt of negative, division by zero, ...).
struct DomainError : Error {
    using Error::Error;
};

struct SyntaxError : Error {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t at)
        : Error(msg + " (at offset " + std::to_string(at) + ")"), offset(at) {}
};

struct UnknownSymbol : Error {
    std::string symbol;
    explicit UnknownSymbol(const std::string& name)
        : Error("unknown symbol '" + name + "'"), symbol(name) {}
};

// Frame field breaks a(x)·eta·a(x)^T = eta beyond tolerance; the antisymmetry
// of the derived connection (Eq. 15) is no longer guaranteed.
struct FrameNotOrthonormal : Error {
    using Error::Error;
};

// Rank-deficient pointwise linear system (torsion-free connection solve).
struct SingularSystem : Error {
    using Error::Error;
};

struct NonRealDensity : Error {
    using Error::Error;
};
struct NonRealLagrangian : Error {
    using Error::Error;
};
struct NonRealTensor : Error {
    using Error::Error;
};
struct NonRealCurrent : Error {
    using Error::Error;
};

// Scenario file problems.
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    std::string field;
    explicit ValidationError(const std::string& f)
        : Error("missing or invalid scenario field: " + f), field(f) {}
};

}  // namespace sfield
