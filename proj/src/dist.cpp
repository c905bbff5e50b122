#include "winprob/dist.hpp"

#include "winprob/errors.hpp"
#include "winprob/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace winprob {

namespace {

// Remainder of the Stirling series: lgamma(z) - [(z - 1/2) ln z - z + ln(2 pi) / 2].
double stirling_remainder(double z)
{
    const double z2 = 1.0 / (z * z);
    return (1.0 / 12.0 -
            z2 * (1.0 / 360.0 - z2 * (1.0 / 1260.0 - z2 * (1.0 / 1680.0 - z2 / 1188.0)))) /
           z;
}

// log[x^a (1 - x)^b / B(a, b)] for 0 < x < 1.
//
// For large shapes lgamma(a) + lgamma(b) - lgamma(a + b) cancels badly, so the
// leading Stirling terms are folded into the power terms and only the small
// remainders are combined.
double log_power_prefix(double x, double a, double b)
{
    if (a >= 10.0 && b >= 10.0) {
        const double c = a + b;
        const double xc = x * c;
        const double t1 = (xc - a) / a;
        const double t2 = (a - xc) / b;
        const double term1 = std::abs(t1) < 0.5 ? a * std::log1p(t1) : a * std::log(xc / a);
        const double term2 =
            std::abs(t2) < 0.5 ? b * std::log1p(t2) : b * std::log((1.0 - x) * c / b);
        return term1 + term2 + 0.5 * std::log(a * b / c) - 0.5 * std::log(2.0 * std::numbers::pi) -
               (stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(c));
    }
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return a * std::log(x) + b * std::log1p(-x) - lbeta;
}

// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
// x < (a + 1) / (a + b + 2).
double incbeta_cf(double a, double b, double x)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 200000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

// Lower and upper tails of I_x(a, b), whichever side the continued fraction
// is evaluated on directly is returned without cancellation.
struct Tails {
    double lower;
    double upper;
};

Tails incbeta_tails(double x, double a, double b)
{
    if (x <= 0.0) return {0.0, 1.0};
    if (x >= 1.0) return {1.0, 0.0};
    const double prefix = std::exp(log_power_prefix(x, a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double lower = prefix * incbeta_cf(a, b, x) / a;
        return {lower, 1.0 - lower};
    }
    const double upper = prefix * incbeta_cf(b, a, 1.0 - x) / b;
    return {1.0 - upper, upper};
}

void check_unit(double x, const char* who)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(who) + ": x must lie in [0, 1]");
    }
}

} // namespace

void BetaParams::validate() const
{
    auto ok = [](double s) { return std::isfinite(s) && s > 0.0 && s <= kMaxShape; };
    if (!ok(alpha) || !ok(beta)) {
        throw DomainError("Beta shapes must be positive, finite and at most 1e7 (got alpha=" +
                          std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
    }
}

double BetaParams::variance() const
{
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
}

double log_beta_pdf(double x, const BetaParams& p)
{
    p.validate();
    check_unit(x, "beta_pdf");
    const double a = p.alpha;
    const double b = p.beta;
    if (x == 0.0 || x == 1.0) {
        const double edge_shape = x == 0.0 ? a : b;
        if (edge_shape > 1.0) return -std::numeric_limits<double>::infinity();
        if (edge_shape < 1.0) return std::numeric_limits<double>::infinity();
        const double other = x == 0.0 ? b : a;
        return std::log(other); // 1 / B(1, other)
    }
    return log_power_prefix(x, a, b) - std::log(x) - std::log1p(-x);
}

double beta_pdf(double x, const BetaParams& p)
{
    return std::exp(log_beta_pdf(x, p));
}

double beta_cdf(double x, const BetaParams& p)
{
    p.validate();
    check_unit(x, "beta_cdf");
    return incbeta_tails(x, p.alpha, p.beta).lower;
}

double beta_ccdf(double x, const BetaParams& p)
{
    p.validate();
    check_unit(x, "beta_ccdf");
    return incbeta_tails(x, p.alpha, p.beta).upper;
}

double beta_quantile(double u, const BetaParams& p)
{
    p.validate();
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("beta_quantile: u must lie in (0, 1)");
    }
    if (p.alpha == 1.0 && p.beta == 1.0) return u;

    // Compare on the smaller tail so the residual keeps relative precision.
    const bool use_upper = u > 0.5;
    const double target = use_upper ? 1.0 - u : u;
    auto residual = [&](double x) {
        const Tails t = incbeta_tails(x, p.alpha, p.beta);
        // Sign convention: F(x) - u.
        return use_upper ? target - t.upper : t.lower - target;
    };

    double lo = 0.0;
    double hi = 1.0;
    const double sd = std::sqrt(p.variance());
    double x = std::clamp(p.mean() + normal_quantile(u) * sd, 1e-300, 1.0 - 1e-16);

    constexpr int max_iter = 2000;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double r = residual(x);
        if (r == 0.0) return x;
        if (r < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (std::abs(r) <= 1e-15 * target) return x;

        const double dens = std::exp(log_beta_pdf(x, p));
        double next = x - r / dens;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * x ||
            hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) {
            // Newton stops within a couple of ulps; settle on the best neighbour.
            double best = next;
            double best_r = std::abs(residual(next));
            for (double cand : {std::nextafter(next, 0.0), std::nextafter(next, 1.0)}) {
                if (!(cand > 0.0 && cand < 1.0)) continue;
                const double rc = std::abs(residual(cand));
                if (rc < best_r) {
                    best = cand;
                    best_r = rc;
                }
            }
            return best;
        }
        x = next;
    }
    throw NumericError("beta_quantile did not converge");
}

double scaled_cdf(double x, const ScaledBetaMarginal& m)
{
    if (!(x >= 0.0 && x <= ScaledBetaMarginal::scale)) {
        throw DomainError("scaled_cdf: x must lie in [0, 1/2]");
    }
    return beta_cdf(2.0 * x, m.params);
}

double scaled_pdf(double x, const ScaledBetaMarginal& m)
{
    if (!(x >= 0.0 && x <= ScaledBetaMarginal::scale)) {
        throw DomainError("scaled_pdf: x must lie in [0, 1/2]");
    }
    return 2.0 * beta_pdf(2.0 * x, m.params);
}

double scaled_quantile(double u, const ScaledBetaMarginal& m)
{
    return ScaledBetaMarginal::scale * beta_quantile(u, m.params);
}

} // namespace winprob
