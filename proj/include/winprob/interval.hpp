#pragma once

#include <string>

namespace winprob {

// Closed interval estimate of a vote share, as a fraction in [0, 1],
// published at a stated confidence level (1 - gamma).
struct Interval {
    double low = 0.0;
    double high = 0.0;
    double confidence = 0.95;

    // Throws DomainError unless 0 <= low < high <= 1 and 0 < confidence < 1.
    void validate() const;

    double midpoint() const { return 0.5 * (low + high); }
    double margin_of_error() const { return 0.5 * (high - low); }
    double gamma() const { return 1.0 - confidence; }
};

Interval make_interval(double low, double high, double confidence = 0.95);

std::string to_string(const Interval& iv);

} // namespace winprob
