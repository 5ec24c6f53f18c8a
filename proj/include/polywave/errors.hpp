#pragma once

#include <stdexcept>
#include <string>

namespace polywave {

// Bad user input: CLI arguments, config files, tagging rules. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent mesh or discrete structure (assembly bug, broken polygon).
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear algebra breakdown: factorization failure, non-convergence. Exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Ill-conditioned local system (Gram/Cholesky breakdown on a cell).
struct ConditioningError : std::runtime_error {
    explicit ConditioningError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace polywave
