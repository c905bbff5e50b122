#pragma once

#include "winprob/dist.hpp"
#include "winprob/errors.hpp"
#include "winprob/interval.hpp"

#include <string>

namespace winprob {

struct FitReport {
    ScaledBetaMarginal marginal;
    double achieved_low_quantile = 0.0;
    double achieved_high_quantile = 0.0;
    // Squared quantile residuals on the unscaled Beta scale.
    double objective_value = 0.0;
    int iterations = 0;
    // Mass that the fitted marginal places on [low, high].
    double coverage = 0.0;
};

// Thrown when the optimizer cannot match the interval; carries the best point.
class FitError : public NumericError {
public:
    FitError(const std::string& what, FitReport best)
        : NumericError(what), best_(best) {}
    const FitReport& best() const { return best_; }

private:
    FitReport best_;
};

// Intervals narrower than this cannot be matched below the shape cap.
inline constexpr double kMinIntervalWidth = 1e-5;

// Quantile-matching fit of a Beta law on [0, 1/2]: find (alpha, beta) with
// P(X <= low) = gamma/2 and P(X <= high) = 1 - gamma/2.
FitReport fit_marginal(const Interval& iv);

// Moment-matching starting point used by fit_marginal.
BetaParams moment_start(const Interval& iv);

} // namespace winprob
