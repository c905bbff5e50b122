#pragma once

// Beta distribution primitives and the Beta law rescaled to [0, 1/2].

namespace winprob {

// Shapes above this are rejected; the incomplete-beta evaluation is only
// validated up to here.
inline constexpr double kMaxShape = 1e7;

struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;

    // Throws DomainError for nonpositive, non-finite, or over-cap shapes.
    void validate() const;
    double mean() const { return alpha / (alpha + beta); }
    double variance() const;
};

double beta_pdf(double x, const BetaParams& p);
double log_beta_pdf(double x, const BetaParams& p);

// Regularized incomplete beta I_x(alpha, beta). Domain error outside [0, 1].
double beta_cdf(double x, const BetaParams& p);

// Upper tail 1 - I_x(alpha, beta), computed without cancellation.
double beta_ccdf(double x, const BetaParams& p);

// Inverse of beta_cdf for u in (0, 1).
double beta_quantile(double u, const BetaParams& p);

// X = B / 2 with B ~ Beta(alpha, beta), so P(0 <= X <= 1/2) = 1.
struct ScaledBetaMarginal {
    static constexpr double scale = 0.5;
    BetaParams params;
};

double scaled_cdf(double x, const ScaledBetaMarginal& m);
double scaled_pdf(double x, const ScaledBetaMarginal& m);
double scaled_quantile(double u, const ScaledBetaMarginal& m);

} // namespace winprob
