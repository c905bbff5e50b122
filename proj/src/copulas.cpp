#include "winprob/copulas.hpp"

#include "winprob/errors.hpp"
#include "winprob/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace winprob {

namespace {

// Frank copula for theta > 0. For small theta the textbook form is well
// conditioned. Otherwise 1 + (e^{-tu}-1)(e^{-tv}-1)/(e^{-t}-1) = N / (1 - e^{-t}) with
// N = e^{-tu}(1 - e^{-tv}) + e^{-tv}(1 - e^{-t(1-v)}), both terms nonnegative.
// Summing logs keeps full relative precision where the textbook form
// loses it to a log1p argument near -1.
double frank_cdf_positive(double u, double v, double theta)
{
    if (theta < 1.0) {
        const double num = std::expm1(-theta * u) * std::expm1(-theta * v);
        return -std::log1p(num / std::expm1(-theta)) / theta;
    }
    const double l1 = -theta * u + std::log(-std::expm1(-theta * v));
    const double l2 = -theta * v + std::log(-std::expm1(-theta * (1.0 - v)));
    const double hi = std::max(l1, l2);
    if (hi == -std::numeric_limits<double>::infinity()) return 0.0;
    const double log_n = hi + std::log1p(std::exp(std::min(l1, l2) - hi));
    return -(log_n - std::log1p(-std::exp(-theta))) / theta;
}

// Inverse of dC/du in v. For larger theta the ratio inside the log is formed
// from logs of nonnegative terms, as above.
double frank_conditional_positive(double u, double w, double theta)
{
    if (theta >= 1.0 && w > 0.0 && w < 1.0) {
        const auto lse = [](double a, double b) {
            const double hi = std::max(a, b);
            return hi + std::log1p(std::exp(std::min(a, b) - hi));
        };
        const double lw = std::log(w);
        const double lq = std::log1p(-w);
        return -(lse(lq - theta * u, lw - theta) - lse(lw, lq - theta * u)) / theta;
    }
    const double denom = w + (1.0 - w) * std::exp(-theta * u);
    return -std::log1p(w * std::expm1(-theta) / denom) / theta;
}

void check_unit_square(double u, double v)
{
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
        throw DomainError("copula arguments must lie in the unit square");
    }
}

// Adaptive Gauss-Kronrod with an absolute tolerance per unit width; the
// reflected Frank branch carries roundoff a relative criterion never beats.
template <class F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth)
{
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double whole = gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    if (err <= tol * (b - a) || depth == 0) return whole;
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, tol, depth - 1) + adaptive_gk(f, m, b, tol, depth - 1);
}

double integrate_unit_square(const CopulaSpec& c)
{
    // Strong dependence concentrates curvature along v = u (positive) or
    // v = 1 - u (negative); split the inner integral there.
    // The integrand is the raw Frank form: clamping to the bounds would add kinks.
    const bool positive = c.theta > 0.0;
    const double t = std::abs(c.theta);
    auto inner = [&](double u) {
        auto f = [&](double v) {
            return positive ? frank_cdf_positive(u, v, t) : u - frank_cdf_positive(u, 1.0 - v, t);
        };
        const double knot = positive ? u : 1.0 - u;
        return adaptive_gk(f, 0.0, knot, 1e-12, 30) + adaptive_gk(f, knot, 1.0, 1e-12, 30);
    };
    return adaptive_gk(inner, 0.0, 0.5, 1e-9, 30) + adaptive_gk(inner, 0.5, 1.0, 1e-9, 30);
}

} // namespace

std::string to_string(CopulaFamily f)
{
    switch (f) {
    case CopulaFamily::Frank: return "frank";
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::LowerW: return "lower-w";
    case CopulaFamily::UpperM: return "upper-m";
    case CopulaFamily::Independence: return "independence";
    }
    return "unknown";
}

CopulaFamily parse_copula_family(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "frank") return CopulaFamily::Frank;
    if (s == "gaussian" || s == "normal") return CopulaFamily::Gaussian;
    if (s == "lower-w" || s == "w" || s == "lowerw") return CopulaFamily::LowerW;
    if (s == "upper-m" || s == "m" || s == "upperm") return CopulaFamily::UpperM;
    if (s == "independence" || s == "pi") return CopulaFamily::Independence;
    throw DomainError("unknown copula family '" + std::string(name) +
                      "' (expected frank, gaussian, lower-w, upper-m, independence)");
}

void CopulaSpec::validate() const
{
    switch (family) {
    case CopulaFamily::Frank:
        if (!std::isfinite(theta) || theta == 0.0) {
            throw DomainError("Frank copula parameter must be finite and nonzero");
        }
        break;
    case CopulaFamily::Gaussian:
        if (!(theta > -1.0 && theta < 1.0)) {
            throw DomainError("Gaussian copula correlation must lie strictly inside (-1, 1)");
        }
        break;
    default:
        break;
    }
}

std::string to_string(const CopulaSpec& c)
{
    std::ostringstream os;
    os << to_string(c.family);
    if (c.family == CopulaFamily::Frank || c.family == CopulaFamily::Gaussian) {
        os.precision(10);
        os << '(' << c.theta << ')';
    }
    return os.str();
}

double copula_cdf(double u, double v, const CopulaSpec& c)
{
    c.validate();
    check_unit_square(u, v);
    switch (c.family) {
    case CopulaFamily::Independence: return u * v;
    case CopulaFamily::LowerW: return std::max(u + v - 1.0, 0.0);
    case CopulaFamily::UpperM: return std::min(u, v);
    case CopulaFamily::Frank: {
        double r = c.theta > 0.0 ? frank_cdf_positive(u, v, c.theta)
                                 : u - frank_cdf_positive(u, 1.0 - v, -c.theta);
        return std::clamp(r, std::max(u + v - 1.0, 0.0), std::min(u, v));
    }
    case CopulaFamily::Gaussian: {
        if (u == 0.0 || v == 0.0) return 0.0;
        if (u == 1.0) return v;
        if (v == 1.0) return u;
        const double r =
            bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), c.theta);
        return std::clamp(r, std::max(u + v - 1.0, 0.0), std::min(u, v));
    }
    }
    return 0.0;
}

double conditional_inverse(double u, double w, const CopulaSpec& c)
{
    switch (c.family) {
    case CopulaFamily::Independence: return w;
    case CopulaFamily::LowerW: return 1.0 - u;
    case CopulaFamily::UpperM: return u;
    case CopulaFamily::Frank:
        return c.theta > 0.0 ? frank_conditional_positive(u, w, c.theta)
                             : 1.0 - frank_conditional_positive(u, 1.0 - w, -c.theta);
    case CopulaFamily::Gaussian: {
        const double r = c.theta;
        const double z = r * normal_quantile(u) + std::sqrt(1.0 - r * r) * normal_quantile(w);
        return normal_cdf(z);
    }
    }
    return w;
}

std::pair<double, double> sample_pair(const CopulaSpec& c, Xoshiro256& rng)
{
    c.validate();
    const double u = rng.uniform_open();
    const double w = rng.uniform_open();
    return {u, conditional_inverse(u, w, c)};
}

double spearman_rho(const CopulaSpec& c)
{
    c.validate();
    switch (c.family) {
    case CopulaFamily::Independence: return 0.0;
    case CopulaFamily::LowerW: return -1.0;
    case CopulaFamily::UpperM: return 1.0;
    case CopulaFamily::Gaussian: return 6.0 / std::numbers::pi * std::asin(c.theta / 2.0);
    case CopulaFamily::Frank: return std::clamp(12.0 * integrate_unit_square(c) - 3.0, -1.0, 1.0);
    }
    return 0.0;
}

CopulaSpec calibrate_to_spearman(CopulaFamily family, double target_rho)
{
    if (!(target_rho >= -1.0 && target_rho <= 1.0)) {
        throw DomainError("Spearman rho must lie in [-1, 1]");
    }
    if (family == CopulaFamily::LowerW || family == CopulaFamily::UpperM ||
        family == CopulaFamily::Independence) {
        const CopulaSpec fixed{family, 0.0};
        if (std::abs(spearman_rho(fixed) - target_rho) > 1e-12) {
            throw NumericError(to_string(family) + " copula has fixed Spearman rho " +
                               std::to_string(spearman_rho(fixed)));
        }
        return fixed;
    }
    if (target_rho == -1.0) return CopulaSpec::lower_w();
    if (target_rho == 1.0) return CopulaSpec::upper_m();
    if (target_rho == 0.0) return CopulaSpec::independence();

    double lo;
    double hi;
    std::function<double(double)> rho_of;
    if (family == CopulaFamily::Gaussian) {
        lo = -1.0;
        hi = 1.0;
        rho_of = [](double r) { return spearman_rho(CopulaSpec::gaussian(r)); };
    } else {
        // rho(theta) is odd, so bisect on the half-line matching the sign.
        lo = target_rho < 0.0 ? -kFrankThetaBound : 0.0;
        hi = target_rho < 0.0 ? 0.0 : kFrankThetaBound;
        rho_of = [](double t) { return spearman_rho(CopulaSpec::frank(t)); };
        const double edge = rho_of(target_rho < 0.0 ? lo : hi);
        if (std::abs(target_rho) > std::abs(edge)) {
            throw NumericError("Spearman rho " + std::to_string(target_rho) +
                               " is not reachable by the Frank family with |theta| <= 50");
        }
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double r = (family == CopulaFamily::Frank && mid == 0.0) ? 0.0 : rho_of(mid);
        (r < target_rho ? lo : hi) = mid;
    }
    const double param = 0.5 * (lo + hi);
    return family == CopulaFamily::Gaussian ? CopulaSpec::gaussian(param) : CopulaSpec::frank(param);
}

} // namespace winprob
