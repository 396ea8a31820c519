#pragma once

#include <stdexcept>
#include <string>

namespace ks {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-facing configuration: sizes, ranges, unknown keys, file format.
struct config_error : error {
    using error::error;
};

// Mathematical precondition violated (p < 1 norms, negative density, ...).
struct domain_error : error {
    using error::error;
};

// Mismatched containers (field/grid/flux sizes).
struct structural_error : error {
    using error::error;
};

// Iterative solver did not meet its residual contract.
struct solver_error : error {
    solver_error(const std::string& what, double residual, int iterations)
        : error(what), residual(residual), iterations(iterations) {}
    double residual = 0.0;
    int iterations = 0;
};

// Pure Neumann solve with incompatible (nonzero-mean) right-hand side.
struct solvability_error : error {
    using error::error;
};

// Discrete scheme violated an invariant it is supposed to preserve.
struct scheme_error : error {
    using error::error;
};

}  // namespace ks
