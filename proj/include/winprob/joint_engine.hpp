#pragma once

#include "winprob/copulas.hpp"
#include "winprob/dist.hpp"
#include "winprob/marginal.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace winprob {

// Leader X and runner-up Y coupled by a copula.
struct JointModel {
    Marginal leader;
    Marginal runner_up;
    CopulaSpec copula;

    static JointModel scaled(const ScaledBetaMarginal& leader, const ScaledBetaMarginal& runner_up,
                             const CopulaSpec& copula)
    {
        return {Marginal::scaled_beta(leader), Marginal::scaled_beta(runner_up), copula};
    }
};

// The 0.6 percentage-point rule.
inline constexpr double kDefaultMarginThreshold = 0.006;
inline constexpr std::size_t kChunkSize = 65536;
inline constexpr std::uint64_t kDefaultSeed = 20060702;

struct SimulationOptions {
    std::size_t n = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    double margin_threshold = kDefaultMarginThreshold;
    // 0 selects default_thread_count().
    unsigned threads = 0;
    // Keep the (x, y) draws in the result for plotting.
    bool keep_samples = false;
};

struct SimulationResult {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double margin_threshold = 0.0;
    std::size_t wins = 0;
    std::size_t margin_hits = 0;
    double win_probability = 0.0;
    double win_std_error = 0.0;
    double margin_probability = 0.0;
    double empirical_spearman = 0.0;
    std::size_t samples_in_simplex = 0;
    std::vector<double> x;
    std::vector<double> y;
};

// WINPROB_THREADS if set to a positive integer, otherwise the hardware count.
unsigned default_thread_count();

// Seeded Monte Carlo estimate of P(X > Y) and P(|X - Y| < m). Draws are
// generated in chunks of kChunkSize, chunk k using the seed's stream advanced
// by k jumps, so results do not depend on the worker count. Ties x = y are
// not wins. Throws SimplexViolation if any draw leaves the simplex.
SimulationResult simulate(const JointModel& model, const SimulationOptions& opts);

// Y = g_delta(X) with X drawn from `x_law`, same chunk layout as simulate.
SimulationResult simulate_g_delta(const Marginal& x_law, double delta,
                                  const SimulationOptions& opts);

// Spearman correlation of paired samples, average ranks for ties.
double empirical_spearman(std::span<const double> x, std::span<const double> y);

// CSV with header "x,y" and six fixed decimals per value.
void write_samples_csv(std::ostream& os, std::span<const double> x, std::span<const double> y);

using Cdf = std::function<double(double)>;

// Y = 1 - X: P(X > Y) = 1 - F_X(1/2).
double win_prob_countermonotone(const Cdf& fx);

// Piecewise-linear coupling of [0, 1] onto [0, 1 - delta]: rising with slope
// (1 - delta) / delta on [0, delta], then 1 - x.
double g_delta_apply(double x, double delta);

// CDF of Y = g_delta(X): F_X(delta y / (1 - delta)) + 1 - F_X(1 - y).
double g_delta_induced_cdf(double y, double delta, const Cdf& fx);

// P(X > g_delta(X)): 1 for delta >= 1/2, otherwise 1 - F_X(1/2).
double win_prob_g_delta(double delta, const Cdf& fx);

} // namespace winprob
