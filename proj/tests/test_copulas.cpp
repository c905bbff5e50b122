#include "winprob/copulas.hpp"
#include "winprob/errors.hpp"
#include "winprob/joint_engine.hpp"
#include "winprob/marginal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace winprob;

namespace {

double W(double u, double v) { return std::max(u + v - 1.0, 0.0); }
double M(double u, double v) { return std::min(u, v); }

// Debye function D_k(t) = k / t^k * int_0^t s^k / (e^s - 1) ds by composite
// Simpson, for t > 0.
double debye(int k, double t)
{
    const int n = 20000;
    const double h = t / n;
    auto f = [k](double s) { return s == 0.0 ? (k == 1 ? 1.0 : 0.0) : std::pow(s, k) / std::expm1(s); };
    double acc = f(0.0) + f(t);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return k / std::pow(t, k) * acc * h / 3.0;
}

// Closed form for the Frank family; odd in theta.
double frank_rho_oracle(double theta)
{
    if (theta < 0) return -frank_rho_oracle(-theta);
    return 1.0 - 12.0 / theta * (debye(1, theta) - debye(2, theta));
}

double ks_uniform(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max(d, std::abs((i + 1) / n - xs[i]));
        d = std::max(d, std::abs(xs[i] - i / n));
    }
    return d;
}

std::vector<CopulaSpec> random_specs(int count, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> theta(-40.0, 40.0);
    std::uniform_real_distribution<double> corr(-0.99, 0.99);
    std::vector<CopulaSpec> out{CopulaSpec::lower_w(), CopulaSpec::upper_m(),
                                CopulaSpec::independence()};
    while (static_cast<int>(out.size()) < count) {
        if (out.size() % 2) out.push_back(CopulaSpec::frank(theta(gen)));
        else out.push_back(CopulaSpec::gaussian(corr(gen)));
    }
    return out;
}

} // namespace

TEST_CASE("copula cdf at a point")
{
    CHECK(copula_cdf(0.3, 0.5, CopulaSpec::independence()) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(copula_cdf(0.3, 0.5, CopulaSpec::lower_w()) == 0.0);
    CHECK(copula_cdf(0.3, 0.5, CopulaSpec::upper_m()) == 0.3);
}

TEST_CASE("copula cdf is grounded with uniform margins")
{
    for (const auto& c : random_specs(20, 7)) {
        CAPTURE(to_string(c));
        for (double t : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
            CHECK(copula_cdf(t, 0.0, c) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(copula_cdf(0.0, t, c) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(std::abs(copula_cdf(t, 1.0, c) - t) <= 1e-12);
            CHECK(std::abs(copula_cdf(1.0, t, c) - t) <= 1e-12);
        }
    }
}

TEST_CASE("copula cdf outside the unit square is a domain error")
{
    CHECK_THROWS_AS(copula_cdf(-0.1, 0.5, CopulaSpec::independence()), DomainError);
    CHECK_THROWS_AS(copula_cdf(0.5, 1.1, CopulaSpec::frank(2.0)), DomainError);
    CHECK_THROWS_AS(CopulaSpec::gaussian(1.0).validate(), DomainError);
    CHECK_THROWS_AS(CopulaSpec::frank(0.0).validate(), DomainError);
}

TEST_CASE("Frechet-Hoeffding sandwich on a 101x101 grid")
{
    for (const auto& c : random_specs(50, 11)) {
        CAPTURE(to_string(c));
        int bad = 0;
        for (int i = 0; i <= 100; ++i) {
            for (int j = 0; j <= 100; ++j) {
                const double u = i / 100.0, v = j / 100.0;
                const double val = copula_cdf(u, v, c);
                if (val < W(u, v) - 1e-12 || val > M(u, v) + 1e-12) ++bad;
            }
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("copula cdf is 2-increasing")
{
    for (const auto& c : random_specs(12, 3)) {
        CAPTURE(to_string(c));
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            for (int j = 0; j < 40; ++j) {
                const double u0 = i / 40.0, u1 = (i + 1) / 40.0;
                const double v0 = j / 40.0, v1 = (j + 1) / 40.0;
                const double vol = copula_cdf(u1, v1, c) - copula_cdf(u0, v1, c) -
                                   copula_cdf(u1, v0, c) + copula_cdf(u0, v0, c);
                worst = std::min(worst, vol);
            }
        }
        CHECK(worst >= -1e-12);
    }
}

TEST_CASE("Frank limits")
{
    // At theta = +-35 the largest gap to the bound sits at the centre and is
    // log(2)/35 to leading order, so it is checked against that value.
    double to_w = 0.0, to_m = 0.0, to_pi = 0.0;
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double u = i / 100.0, v = j / 100.0;
            to_w = std::max(to_w, std::abs(copula_cdf(u, v, CopulaSpec::frank(-35.0)) - W(u, v)));
            to_m = std::max(to_m, std::abs(copula_cdf(u, v, CopulaSpec::frank(35.0)) - M(u, v)));
            for (double t : {-1e-3, 1e-3}) {
                to_pi = std::max(to_pi, std::abs(copula_cdf(u, v, CopulaSpec::frank(t)) - u * v));
            }
        }
    }
    const double centre_gap = std::log(2.0) / 35.0;
    CHECK(to_w == doctest::Approx(centre_gap).epsilon(0.01));
    CHECK(to_m == doctest::Approx(centre_gap).epsilon(0.01));
    CHECK(to_pi <= 1e-3);
    // The gap closes like 1/theta.
    const double gap200 = std::abs(copula_cdf(0.5, 0.5, CopulaSpec::frank(200.0)) - 0.5);
    CHECK(gap200 <= 0.005);
    CHECK(std::abs(copula_cdf(0.5, 0.5, CopulaSpec::frank(-200.0))) <= 0.005);
}

TEST_CASE("conditional inverse inverts the conditional cdf")
{
    const double h = 1e-6;
    for (double theta : {-45.0, -8.0, -0.5, 0.3, 4.0, 30.0}) {
        const auto c = CopulaSpec::frank(theta);
        for (double u : {0.05, 0.3, 0.5, 0.77, 0.96}) {
            for (double w : {0.01, 0.2, 0.5, 0.8, 0.99}) {
                const double v = conditional_inverse(u, w, c);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                const double dcdu = (copula_cdf(u + h, v, c) - copula_cdf(u - h, v, c)) / (2 * h);
                CAPTURE(theta);
                CAPTURE(u);
                CAPTURE(w);
                CHECK(std::abs(dcdu - w) <= 1e-5);
            }
        }
    }
}

TEST_CASE("bound couplings sample on the diagonals")
{
    Xoshiro256 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto [u, v] = sample_pair(CopulaSpec::lower_w(), rng);
        CHECK(v == 1.0 - u);
        const auto [a, b] = sample_pair(CopulaSpec::upper_m(), rng);
        CHECK(a == b);
    }
}

TEST_CASE("sampled pairs match the copula cdf and have uniform margins")
{
    const std::size_t n = 1'000'000;
    for (const auto& c : {CopulaSpec::frank(-5.7), CopulaSpec::frank(12.0),
                          CopulaSpec::gaussian(-0.618), CopulaSpec::gaussian(0.4),
                          CopulaSpec::independence()}) {
        CAPTURE(to_string(c));
        Xoshiro256 rng(20060702);
        std::vector<double> us(n), vs(n);
        std::vector<double> counts(100, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto [u, v] = sample_pair(c, rng);
            us[k] = u;
            vs[k] = v;
            // Count into the grid cells at or above (u, v), accumulated below.
            const int i = static_cast<int>(std::ceil(u * 10.0)) - 1;
            const int j = static_cast<int>(std::ceil(v * 10.0)) - 1;
            counts[std::max(i, 0) * 10 + std::max(j, 0)] += 1.0;
        }
        double sup = 0.0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                double below = 0.0;
                for (int a = 0; a <= i; ++a)
                    for (int b = 0; b <= j; ++b) below += counts[a * 10 + b];
                const double u = (i + 1) / 10.0, v = (j + 1) / 10.0;
                sup = std::max(sup, std::abs(below / n - copula_cdf(u, v, c)));
            }
        }
        CHECK(sup <= 0.005);
        CHECK(ks_uniform(us) <= 0.002);
        CHECK(ks_uniform(vs) <= 0.002);
    }
}

TEST_CASE("spearman rho of the bounds and of independence")
{
    CHECK(spearman_rho(CopulaSpec::independence()) == 0.0);
    CHECK(spearman_rho(CopulaSpec::upper_m()) == 1.0);
    CHECK(spearman_rho(CopulaSpec::lower_w()) == -1.0);
}

TEST_CASE("spearman rho of the Gaussian family")
{
    const double expected = 6.0 / std::numbers::pi * std::asin(0.3);
    CHECK(spearman_rho(CopulaSpec::gaussian(0.6)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(expected - 0.5816) <= 5e-4);
}

TEST_CASE("spearman rho of the Frank family matches the Debye form")
{
    for (double theta : {-50.0, -20.0, -3.3, -0.4, 0.01, 1.0, 2.5, 9.0, 33.0, 50.0}) {
        CAPTURE(theta);
        CHECK(std::abs(spearman_rho(CopulaSpec::frank(theta)) - frank_rho_oracle(theta)) <= 1e-6);
    }
}

TEST_CASE("calibration to a Spearman target")
{
    const auto g0 = calibrate_to_spearman(CopulaFamily::Gaussian, 0.0);
    CHECK(g0.family == CopulaFamily::Independence);
    const auto g = calibrate_to_spearman(CopulaFamily::Gaussian, -0.6);
    CHECK(g.theta == doctest::Approx(2.0 * std::sin(-0.6 * std::numbers::pi / 6.0)).epsilon(1e-9));
    CHECK(g.theta == doctest::Approx(-0.6180).epsilon(1e-4));

    for (double target : {-0.9, -0.5, -0.2, 0.3, 0.6, 0.9}) {
        CAPTURE(target);
        const auto f = calibrate_to_spearman(CopulaFamily::Frank, target);
        CHECK(f.family == CopulaFamily::Frank);
        CHECK(std::abs(frank_rho_oracle(f.theta) - target) <= 1e-4);
        const auto n = calibrate_to_spearman(CopulaFamily::Gaussian, target);
        CHECK(std::abs(spearman_rho(n) - target) <= 1e-4);
    }

    CHECK(calibrate_to_spearman(CopulaFamily::Frank, 1.0).family == CopulaFamily::UpperM);
    CHECK(calibrate_to_spearman(CopulaFamily::Gaussian, -1.0).family == CopulaFamily::LowerW);
    CHECK_THROWS_AS(calibrate_to_spearman(CopulaFamily::Frank, 1.5), DomainError);
}

TEST_CASE("calibrated Frank sample has the requested Spearman rho")
{
    const auto c = calibrate_to_spearman(CopulaFamily::Frank, -0.5);
    Xoshiro256 rng(99);
    const std::size_t n = 1'000'000;
    std::vector<double> us(n), vs(n);
    for (std::size_t k = 0; k < n; ++k) std::tie(us[k], vs[k]) = sample_pair(c, rng);
    CHECK(std::abs(empirical_spearman(us, vs) + 0.5) <= 0.01);
}

TEST_CASE("tabulated quantile agrees with the exact inverse")
{
    for (const BetaParams& p : {BetaParams{2.0, 3.0}, BetaParams{155.63, 66.15},
                                BetaParams{30983.6, 12839.3}, BetaParams{1.0, 1.0},
                                BetaParams{1.2, 40.0}}) {
        const TabulatedQuantile q(p);
        double worst = 0.0;
        for (double u = 1e-7; u < 1.0; u += 0.000731) {
            worst = std::max(worst, std::abs(q(u) - beta_quantile(u, p)));
        }
        for (double u : {1e-12, 1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9}) {
            worst = std::max(worst, std::abs(q(u) - beta_quantile(u, p)));
        }
        CAPTURE(p.alpha);
        CHECK(worst <= 2e-9);
    }
}
