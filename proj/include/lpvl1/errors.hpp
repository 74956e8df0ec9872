#pragma once

#include <stdexcept>
#include <string>

namespace lpvl1 {

/// Raised when an LMI problem is cleanly infeasible (no numerical failure).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a solver or factorization breaks down numerically.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised on malformed configuration or data files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lpvl1
