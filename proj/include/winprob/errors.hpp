#pragma once

#include <stdexcept>
#include <string>

namespace winprob {

// Argument outside the domain of a function or type invariant violated.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Numerical procedure (fit, calibration) failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simulated pair fell outside {0 <= y <= 1, 0 <= x <= 1 - y}.
class SimplexViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace winprob
