#include "winprob/marginal.hpp"

#include "winprob/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace winprob {

Marginal::Marginal(const BetaParams& p, double scale, bool reflected)
    : params_(p), scale_(scale), reflected_(reflected)
{
    params_.validate();
    if (!(scale > 0.0 && scale <= 1.0)) {
        throw DomainError("marginal scale must lie in (0, 1]");
    }
}

Marginal Marginal::scaled_beta(const ScaledBetaMarginal& m)
{
    return Marginal(m.params, ScaledBetaMarginal::scale, false);
}

Marginal Marginal::beta(const BetaParams& p, double scale)
{
    return Marginal(p, scale, false);
}

Marginal Marginal::reflected() const
{
    return Marginal(params_, scale_, !reflected_);
}

double Marginal::cdf(double x) const
{
    if (std::isnan(x)) throw DomainError("Marginal::cdf: NaN argument");
    if (!reflected_) {
        if (x <= 0.0) return 0.0;
        if (x >= scale_) return 1.0;
        return beta_cdf(x / scale_, params_);
    }
    const double z = (1.0 - x) / scale_;
    if (z >= 1.0) return 0.0;
    if (z <= 0.0) return 1.0;
    return beta_ccdf(z, params_);
}

double Marginal::quantile(double u) const
{
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("Marginal::quantile: u must lie in [0, 1]");
    auto q = [&](double level) {
        if (level <= 0.0) return 0.0;
        if (level >= 1.0) return 1.0;
        return beta_quantile(level, params_);
    };
    return reflected_ ? 1.0 - scale_ * q(1.0 - u) : scale_ * q(u);
}

namespace {

double hermite(double s, double x0, double x1, double m0, double m1)
{
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * x1 +
           (s3 - s2) * m1;
}

constexpr double kTailLevel = 1e-13;

} // namespace

TabulatedQuantile::TabulatedQuantile(const BetaParams& p, std::size_t cells) : params_(p)
{
    params_.validate();
    const double lo = beta_quantile(kTailLevel, p);
    const double hi = beta_quantile(1.0 - kTailLevel, p);
    const std::size_t n = cells + 1;
    x_.resize(n);
    lower_.resize(n);
    upper_.resize(n);
    dens_.resize(n);
    exact_lower_.assign(cells, 0);
    exact_upper_.assign(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
        x_[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        lower_[i] = beta_cdf(x_[i], p);
        upper_[i] = beta_ccdf(x_[i], p);
        dens_[i] = beta_pdf(x_[i], p);
    }

    // Interpolation error well under anything a 1e7-draw simulation can resolve.
    const double tolerance = 1e-9 * (hi - lo);
    auto check = [&](std::size_t i, double h, double level, double s, bool lower_side) {
        const double xh = hermite(s, x_[i], x_[i + 1], h / dens_[i], h / dens_[i + 1]);
        if (!(xh >= x_[i] && xh <= x_[i + 1])) return false;
        const double res = lower_side ? beta_cdf(xh, p) - level : level - beta_ccdf(xh, p);
        const double dx = std::abs(res) / beta_pdf(xh, p);
        return std::isfinite(dx) && dx <= tolerance;
    };
    // A cell is only ever inverted from the side whose tail it lies in, so
    // only that side is checked; the other difference is lost to cancellation.
    for (std::size_t i = 0; i < cells; ++i) {
        const bool dens_ok = std::isfinite(dens_[i]) && std::isfinite(dens_[i + 1]) &&
                             dens_[i] > 0.0 && dens_[i + 1] > 0.0;
        if (lower_[i] <= 0.5) {
            const double h = lower_[i + 1] - lower_[i];
            const bool good = dens_ok && h > 0.0 &&
                              check(i, h, 0.5 * (lower_[i] + lower_[i + 1]), 0.5, true);
            if (!good) {
                exact_lower_[i] = 1;
                ++exact_cells_;
            }
        }
        if (upper_[i + 1] <= 0.5) {
            const double h = upper_[i] - upper_[i + 1];
            const bool good = dens_ok && h > 0.0 &&
                              check(i, h, 0.5 * (upper_[i] + upper_[i + 1]), 0.5, false);
            if (!good) {
                exact_upper_[i] = 1;
                ++exact_cells_;
            }
        }
    }
}

double TabulatedQuantile::invert_lower(double u) const
{
    auto it = std::upper_bound(lower_.begin(), lower_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - lower_.begin());
    i = std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
    if (exact_lower_[i]) return beta_quantile(u, params_);
    const double h = lower_[i + 1] - lower_[i];
    const double s = std::clamp((u - lower_[i]) / h, 0.0, 1.0);
    return hermite(s, x_[i], x_[i + 1], h / dens_[i], h / dens_[i + 1]);
}

double TabulatedQuantile::invert_upper(double t) const
{
    auto it = std::upper_bound(upper_.begin(), upper_.end(), t, std::greater<>());
    std::size_t i = static_cast<std::size_t>(it - upper_.begin());
    i = std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
    if (exact_upper_[i]) return beta_quantile(1.0 - t, params_);
    const double h = upper_[i] - upper_[i + 1];
    const double s = std::clamp((upper_[i] - t) / h, 0.0, 1.0);
    return hermite(s, x_[i], x_[i + 1], h / dens_[i], h / dens_[i + 1]);
}

double TabulatedQuantile::operator()(double u) const
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (u <= 0.5) {
        if (u < lower_.front() || u > lower_.back()) return beta_quantile(u, params_);
        return invert_lower(u);
    }
    const double t = 1.0 - u;
    if (t < upper_.back() || t > upper_.front()) return beta_quantile(u, params_);
    return invert_upper(t);
}

MarginalSampler::MarginalSampler(const Marginal& m) : marginal_(m), table_(m.params()) {}

double MarginalSampler::quantile(double u) const
{
    const double s = marginal_.scale();
    return marginal_.is_reflected() ? 1.0 - s * table_(1.0 - u) : s * table_(u);
}

} // namespace winprob
