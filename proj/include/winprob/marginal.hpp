#pragma once

#include "winprob/dist.hpp"

#include <cstddef>
#include <vector>

namespace winprob {

// Law of a single vote share: X = scale * B with B ~ Beta(alpha, beta),
// optionally reflected to 1 - scale * B. The scaled-beta marginal is
// scale = 1/2; scale = 1 gives laws on the whole of [0, 1].
class Marginal {
public:
    static Marginal scaled_beta(const ScaledBetaMarginal& m);
    static Marginal beta(const BetaParams& p, double scale = 1.0);
    static Marginal uniform() { return beta(BetaParams{1.0, 1.0}); }

    // Law of 1 - X.
    Marginal reflected() const;

    // CDF on the real line (0 below the support, 1 above it).
    double cdf(double x) const;
    // Quantile for u in [0, 1]; the endpoints map to the support bounds.
    double quantile(double u) const;

    double support_low() const { return reflected_ ? 1.0 - scale_ : 0.0; }
    double support_high() const { return reflected_ ? 1.0 : scale_; }

    const BetaParams& params() const { return params_; }
    double scale() const { return scale_; }
    bool is_reflected() const { return reflected_; }

private:
    Marginal(const BetaParams& p, double scale, bool reflected);

    BetaParams params_;
    double scale_;
    bool reflected_;
};

// Inverse CDF of a Beta law tabulated on a uniform grid and inverted by
// piecewise cubic Hermite interpolation (derivative 1/pdf). Cells whose
// interpolant misses the exact inverse by more than 1e-9 of the grid span,
// and levels beyond the tabulated range, fall back to beta_quantile.
class TabulatedQuantile {
public:
    explicit TabulatedQuantile(const BetaParams& p, std::size_t cells = 4096);

    double operator()(double u) const;

    std::size_t exact_cells() const { return exact_cells_; }

private:
    double invert_lower(double u) const;
    double invert_upper(double t) const;

    BetaParams params_;
    std::vector<double> x_;
    std::vector<double> lower_;  // F(x)
    std::vector<double> upper_;  // 1 - F(x)
    std::vector<double> dens_;
    std::vector<char> exact_lower_;
    std::vector<char> exact_upper_;
    std::size_t exact_cells_ = 0;
};

// Fast sampling view of a Marginal.
class MarginalSampler {
public:
    explicit MarginalSampler(const Marginal& m);
    double quantile(double u) const;

private:
    Marginal marginal_;
    TabulatedQuantile table_;
};

} // namespace winprob
