#pragma once

#include <stdexcept>
#include <string>

namespace migprop {

// Bad arguments to library calls (maps to CLI exit code 1).
struct argument_error : std::invalid_argument {
    explicit argument_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed or inconsistent input data (exit code 2).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical-domain violations: non-positive diffusion, out-of-range densities (exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Iteration/refinement caps exhausted (exit code 3).
struct convergence_error : numeric_error {
    explicit convergence_error(const std::string& msg) : numeric_error(msg) {}
};

}  // namespace migprop
