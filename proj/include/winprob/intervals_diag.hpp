#pragma once

#include "winprob/interval.hpp"

#include <string>

namespace winprob {

struct IntervalPair {
    Interval first;  // leader
    Interval second; // runner-up
};

enum class Overlap { Overlap, Touching, Disjoint };

std::string to_string(Overlap o);

// Overlap when the intervals share more than a point, Touching when they
// share exactly one endpoint, Disjoint otherwise. Symmetric in its arguments.
Overlap classify_overlap(const IntervalPair& p);

// max(|a1 - a2|, |b1 - b2|).
double hausdorff(const IntervalPair& p);

// |a1 - a2|.
double lower_endpoint_distance(const IntervalPair& p);

// |mid1 - mid2|.
double midpoint_distance(const IntervalPair& p);

struct PairDiagnostics {
    Overlap overlap;
    double hausdorff;
    double lower_endpoint;
    double midpoint;
    // True when the lower-endpoint distance understates the Hausdorff distance.
    bool definitions_disagree;
};

PairDiagnostics diagnose(const IntervalPair& p);

} // namespace winprob
