#include "winprob/normal.hpp"

#include "winprob/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace winprob {

double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("normal_quantile: p must lie in [0, 1]");
    }

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement. Work on the smaller tail so the residual keeps
    // its relative precision.
    double e;
    if (p < 0.5) {
        e = normal_cdf(x) - p;
    } else {
        e = (1.0 - p) - normal_cdf(-x);
    }
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

double phi_upper(double z) { return normal_cdf(-z); }

// Probability that Z1 > dh and Z2 > dk.
double bvnu(double dh, double dk, double r)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (dh == inf || dk == inf) return 0.0;
    if (dh == -inf) return dk == -inf ? 1.0 : phi_upper(dk);
    if (dk == -inf) return phi_upper(dh);
    if (r == 0.0) return phi_upper(dh) * phi_upper(dk);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    static constexpr std::array<double, 3> w6 = {0.1713244923791705, 0.3607615730481384,
                                                 0.4679139345726904};
    static constexpr std::array<double, 3> x6 = {0.9324695142031522, 0.6612093864662647,
                                                 0.2386191860831970};
    static constexpr std::array<double, 6> w12 = {0.04717533638651177, 0.1069393259953183,
                                                  0.1600783285433464,  0.2031674267230659,
                                                  0.2334925365383547,  0.2491470458134029};
    static constexpr std::array<double, 6> x12 = {0.9815606342467191, 0.9041172563704750,
                                                  0.7699026741943050, 0.5873179542866171,
                                                  0.3678314989981802, 0.1252334085114692};
    static constexpr std::array<double, 10> w20 = {
        0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
        0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
        0.1491729864726037,  0.1527533871307259};
    static constexpr std::array<double, 10> x20 = {
        0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
        0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
        0.2277858511416451, 0.07652652113349733};

    const double* w;
    const double* x;
    int lg;
    if (std::abs(r) < 0.3) {
        w = w6.data(); x = x6.data(); lg = 3;
    } else if (std::abs(r) < 0.75) {
        w = w12.data(); x = x12.data(); lg = 6;
    } else {
        w = w20.data(); x = x20.data(); lg = 10;
    }

    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r) / 2.0;
        for (int i = 0; i < lg; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (1.0 + sgn * x[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return std::clamp(bvn * asr / two_pi + phi_upper(h) * phi_upper(k), 0.0, 1.0);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = 1.0 - r * r;
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 80.0;
        double asr = -(bs / as + hk) / 2.0;
        if (asr > -100.0) {
            bvn = a * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
        }
        if (hk > -100.0) {
            const double b = std::sqrt(bs);
            const double sp = std::sqrt(two_pi) * phi_upper(b / a);
            bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
        }
        a /= 2.0;
        double sum = 0.0;
        for (int i = 0; i < lg; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double xs = std::pow(a * (1.0 + sgn * x[i]), 2);
                asr = -(bs / xs + hk) / 2.0;
                if (asr > -100.0) {
                    const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                    const double rs = std::sqrt(1.0 - xs);
                    const double ep =
                        std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
                    sum += w[i] * std::exp(asr) * (sp - ep);
                }
            }
        }
        bvn = (a * sum - bvn) / two_pi;
    }
    if (r > 0.0) {
        bvn += phi_upper(std::max(h, k));
    } else if (h >= k) {
        bvn = -bvn;
    } else {
        const double l = h < 0.0 ? normal_cdf(k) - normal_cdf(h) : phi_upper(h) - phi_upper(k);
        bvn = l - bvn;
    }
    return std::clamp(bvn, 0.0, 1.0);
}

} // namespace

double bivariate_normal_cdf(double h, double k, double r)
{
    if (std::isnan(h) || std::isnan(k) || !(r >= -1.0 && r <= 1.0)) {
        throw DomainError("bivariate_normal_cdf: invalid argument");
    }
    return bvnu(-h, -k, r);
}

} // namespace winprob
