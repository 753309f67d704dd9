#pragma once

#include <stdexcept>
#include <string>

namespace mmr {

// Input file / argument shape violations. CLI maps these to exit code 2.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem too large for the exact algorithm. CLI maps these to exit code 3.
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A documented precondition or invariant of an operation was violated.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// construct_from_phi could not realize the requested density.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested quantity is below the resolution of the supplied grid.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A profile curve does not cover the mass range needed by a comparison.
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integral failed the truncation-convergence check.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iteration cap hit, non-convergence, or other numerical breakdown.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mmr
