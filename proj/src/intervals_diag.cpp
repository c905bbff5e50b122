#include "winprob/intervals_diag.hpp"

#include "winprob/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace winprob {

void Interval::validate() const
{
    if (!(std::isfinite(low) && std::isfinite(high) && low >= 0.0 && high <= 1.0)) {
        throw DomainError("interval endpoints must lie in [0, 1]: " + to_string(*this));
    }
    if (!(low < high)) {
        throw DomainError("low must be < high: " + to_string(*this));
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw DomainError("confidence must lie in (0, 1): " + to_string(*this));
    }
}

Interval make_interval(double low, double high, double confidence)
{
    Interval iv{low, high, confidence};
    iv.validate();
    return iv;
}

std::string to_string(const Interval& iv)
{
    std::ostringstream os;
    os.precision(10);
    os << '[' << iv.low << ", " << iv.high << "] @ " << iv.confidence;
    return os.str();
}

std::string to_string(Overlap o)
{
    switch (o) {
    case Overlap::Overlap: return "overlap";
    case Overlap::Touching: return "touching";
    case Overlap::Disjoint: return "disjoint";
    }
    return "unknown";
}

Overlap classify_overlap(const IntervalPair& p)
{
    const double lo = std::max(p.first.low, p.second.low);
    const double hi = std::min(p.first.high, p.second.high);
    if (lo < hi) return Overlap::Overlap;
    if (lo == hi) return Overlap::Touching;
    return Overlap::Disjoint;
}

double hausdorff(const IntervalPair& p)
{
    return std::max(std::abs(p.first.low - p.second.low), std::abs(p.first.high - p.second.high));
}

double lower_endpoint_distance(const IntervalPair& p)
{
    return std::abs(p.first.low - p.second.low);
}

double midpoint_distance(const IntervalPair& p)
{
    return std::abs(p.first.midpoint() - p.second.midpoint());
}

PairDiagnostics diagnose(const IntervalPair& p)
{
    PairDiagnostics d{classify_overlap(p), hausdorff(p), lower_endpoint_distance(p),
                      midpoint_distance(p), false};
    d.definitions_disagree = d.hausdorff > d.lower_endpoint + 1e-12;
    return d;
}

} // namespace winprob
