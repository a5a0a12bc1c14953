#pragma once

#include <stdexcept>
#include <string>

namespace qgpatch {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Diagonal of a self-interaction kernel was requested.
struct SingularKernelError : std::domain_error {
    using std::domain_error::domain_error;
};

// Configuration violates the structural hypotheses (profile shape, separation).
struct HypothesisViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Omega is outside the admissible open window.
struct WindowError : std::domain_error {
    using std::domain_error::domain_error;
};

// No sign change of lambda - 1 on the search bracket. below_threshold: lambda >= 1 already at
// the lower end (mode too small); otherwise lambda stays below 1 up to the upper end.
// deficit is the distance of lambda from 1 at the offending end.
struct NotBracketed : std::runtime_error {
    double deficit;
    bool below_threshold;
    NotBracketed(const std::string& what, double d, bool below = false)
        : std::runtime_error(what), deficit(d), below_threshold(below) {}
};

struct PerturbationTooLarge : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace qgpatch
