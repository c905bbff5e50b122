#include "winprob/marginal_fit.hpp"

#include "winprob/nelder_mead.hpp"
#include "winprob/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace winprob {

namespace {

constexpr double kObjectiveLimit = 1e-10;
constexpr double kQuantileTolerance = 1e-6;
constexpr int kIterationBudget = 500;
constexpr double kMinShape = 1.01;

struct Attempt {
    FitReport report;
    bool ok = false;
};

FitReport evaluate(const Interval& iv, const BetaParams& p, int iterations)
{
    const double g = iv.gamma();
    FitReport r;
    r.marginal = ScaledBetaMarginal{p};
    r.achieved_low_quantile = scaled_quantile(g / 2.0, r.marginal);
    r.achieved_high_quantile = scaled_quantile(1.0 - g / 2.0, r.marginal);
    const double dl = 2.0 * (r.achieved_low_quantile - iv.low);
    const double dh = 2.0 * (r.achieved_high_quantile - iv.high);
    r.objective_value = dl * dl + dh * dh;
    r.iterations = iterations;
    r.coverage = scaled_cdf(iv.high, r.marginal) - scaled_cdf(iv.low, r.marginal);
    return r;
}

Attempt run_from(const Interval& iv, const BetaParams& start, int previous_iterations)
{
    const double g = iv.gamma();
    const double b_low = 2.0 * iv.low;
    const double b_high = 2.0 * iv.high;

    // Search over log-shapes: the shapes span several orders of magnitude.
    auto objective = [&](const std::array<double, 2>& z) {
        const BetaParams p{std::exp(z[0]), std::exp(z[1])};
        if (!(p.alpha > 0.0 && p.beta > 0.0 && p.alpha <= kMaxShape && p.beta <= kMaxShape)) {
            return 1e10 + z[0] * z[0] + z[1] * z[1];
        }
        const double rh = beta_quantile(1.0 - g / 2.0, p) - b_high;
        const double rl = beta_quantile(g / 2.0, p) - b_low;
        return rh * rh + rl * rl;
    };

    optim::NelderMeadOptions opts;
    opts.max_iterations = kIterationBudget;
    opts.initial_step = 0.05;
    opts.target_value = 1e-28;
    const auto nm = optim::nelder_mead<2>(
        objective, std::array<double, 2>{std::log(start.alpha), std::log(start.beta)}, opts);

    Attempt a;
    const BetaParams best{std::exp(nm.point[0]), std::exp(nm.point[1])};
    const int iters = previous_iterations + nm.iterations;
    if (!(best.alpha <= kMaxShape && best.beta <= kMaxShape)) {
        a.report.marginal = ScaledBetaMarginal{best};
        a.report.objective_value = nm.value;
        a.report.iterations = iters;
        return a;
    }
    a.report = evaluate(iv, best, iters);
    a.ok = a.report.objective_value < kObjectiveLimit &&
           std::abs(a.report.achieved_low_quantile - iv.low) <= kQuantileTolerance &&
           std::abs(a.report.achieved_high_quantile - iv.high) <= kQuantileTolerance;
    return a;
}

} // namespace

BetaParams moment_start(const Interval& iv)
{
    const double z = normal_quantile(1.0 - iv.gamma() / 2.0);
    const double mean = iv.low + iv.high;
    const double sd = (iv.high - iv.low) / z;
    const double k = mean * (1.0 - mean) / (sd * sd) - 1.0;
    const double a = std::clamp(mean * k, kMinShape, kMaxShape / 2.0);
    const double b = std::clamp((1.0 - mean) * k, kMinShape, kMaxShape / 2.0);
    return {a, b};
}

FitReport fit_marginal(const Interval& iv)
{
    iv.validate();
    if (iv.high > 0.5) {
        throw DomainError("fit_marginal: interval upper end " + std::to_string(iv.high) +
                          " exceeds 1/2");
    }
    if (iv.high - iv.low < kMinIntervalWidth) {
        throw DomainError("fit_marginal: interval narrower than 1e-5 cannot be fitted");
    }

    Attempt a = run_from(iv, moment_start(iv), 0);
    if (!a.ok) {
        Attempt retry = run_from(iv, BetaParams{18.0, 18.0}, a.report.iterations);
        if (retry.report.objective_value < a.report.objective_value || retry.ok) a = retry;
    }
    const BetaParams& p = a.report.marginal.params;
    if (a.ok && (p.alpha <= 1.0 || p.beta <= 1.0)) {
        a.ok = false;
    }
    if (!a.ok) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "fit_marginal: could not match " << to_string(iv) << "; best alpha=" << p.alpha
            << " beta=" << p.beta << " objective=" << a.report.objective_value
            << " quantiles=(" << a.report.achieved_low_quantile << ", "
            << a.report.achieved_high_quantile << ")";
        throw FitError(msg.str(), a.report);
    }
    return a.report;
}

} // namespace winprob
