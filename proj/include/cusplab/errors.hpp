#pragma once

#include <stdexcept>
#include <string>

namespace cusplab {

// Bad arguments: dimension mismatches, out-of-domain parameters, malformed grids.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation requested at a point where the metric degenerates (r_k = 0, sphere pole).
class SingularPointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative solver failed to converge.  Carries the residual that was reached;
// callers that need the best candidate should use the result-struct APIs instead.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_ = 0.0;
};

} // namespace cusplab
