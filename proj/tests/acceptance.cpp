// Acceptance suite. Each criterion prints its individual checks indented and
// then one summary line "criterion N: PASS|FAIL  title". Exit status is 0 only
// when every requested criterion passes.

#include "winprob/copulas.hpp"
#include "winprob/dist.hpp"
#include "winprob/intervals_diag.hpp"
#include "winprob/joint_engine.hpp"
#include "winprob/marginal_fit.hpp"
#include "winprob/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace winprob;

namespace {

using Clock = std::chrono::steady_clock;

class Criterion {
public:
    explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

    void check(bool ok, const std::string& what)
    {
        std::printf("    [%s] %s\n", ok ? "pass" : "FAIL", what.c_str());
        ok_ = ok_ && ok;
    }

    // |computed - target| <= tol, reported in the units given by `scale`.
    void near(const std::string& what, double computed, double target, double tol, double scale = 1.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: computed %.4f, target %.4f +- %.4f", what.c_str(),
                      computed * scale, target * scale, tol * scale);
        check(std::abs(computed - target) <= tol, buf);
    }

    void at_least(const std::string& what, double computed, double bound, double scale = 1.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: computed %.4f, required >= %.4f", what.c_str(),
                      computed * scale, bound * scale);
        check(computed >= bound, buf);
    }

    bool finish() const
    {
        std::printf("criterion %d: %s  %s\n", id_, ok_ ? "PASS" : "FAIL", title_.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    int id_;
    std::string title_;
    bool ok_ = true;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScaledBetaMarginal fit(double lo_pct, double hi_pct, double conf)
{
    return fit_marginal(make_interval(lo_pct / 100, hi_pct / 100, conf)).marginal;
}

SimulationResult pipeline(const ScaledBetaMarginal& x, const ScaledBetaMarginal& y, CopulaFamily family,
                          double rho, std::size_t n, double margin = kDefaultMarginThreshold)
{
    SimulationOptions o;
    o.n = n;
    o.margin_threshold = margin;
    return simulate(JointModel::scaled(x, y, calibrate_to_spearman(family, rho)), o);
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Frank grid with overlapping 95% intervals.
bool criterion1()
{
    Criterion c(1, "Frank win-probability grid, n = 1e6, within 0.30 pp, <= 60 s");
    const auto t0 = Clock::now();
    const auto x = fit(32.0, 38.0, 0.95);
    const auto y = fit(26.5, 32.5, 0.95);
    const std::vector<std::pair<double, double>> grid{{-0.9, 0.9713}, {-0.5, 0.9854}, {-0.2, 0.9914},
                                                      {0.0, 0.9944},  {0.3, 0.9977},  {0.6, 0.9995},
                                                      {0.9, 0.9999}};
    for (const auto& [rho, target] : grid) {
        const auto r = pipeline(x, y, CopulaFamily::Frank, rho, 1'000'000);
        c.near(fmt("rho %+.1f win %%", rho), r.win_probability, target, 0.003, 100);
    }
    const double secs = seconds_since(t0);
    c.check(secs <= 60.0, fmt("runtime %.1f s <= 60 s", secs));
    return c.finish();
}

// Touching intervals shifted by +-1e-4.
bool criterion2()
{
    Criterion c(2, "overlap +-0.0001 variants within 0.30 pp and < 0.2 pp apart");
    const auto x = fit(32.0, 38.0, 0.95);
    const auto over = pipeline(x, fit(26.01, 32.01, 0.95), CopulaFamily::Frank, -0.5, 1'000'000);
    const auto apart = pipeline(x, fit(25.99, 31.99, 0.95), CopulaFamily::Frank, -0.5, 1'000'000);
    c.near("tau +0.0001 win %", over.win_probability, 0.9919, 0.003, 100);
    c.near("tau -0.0001 win %", apart.win_probability, 0.9921, 0.003, 100);
    const double gap = std::abs(over.win_probability - apart.win_probability);
    c.check(gap < 0.002, fmt("variants differ by %.4f pp < 0.2 pp", gap * 100));
    return c.finish();
}

// 2006 Bayesiano intervals, Gaussian copula.
bool criterion3()
{
    Criterion c(3, "Bayesiano 99% Gaussian grid, n = 1e7, m = 0.006, <= 10 min");
    const auto t0 = Clock::now();
    const auto x = fit(35.77, 36.40, 0.99);
    const auto y = fit(35.07, 35.63, 0.99);
    for (double rho : {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9}) {
        const auto r = pipeline(x, y, CopulaFamily::Gaussian, rho, 10'000'000, 0.006);
        const std::string tag = fmt("rho %+.1f", rho);
        if (rho == -0.9) {
            c.near(tag + " win %", r.win_probability, 0.9994, 0.001, 100);
            c.near(tag + " margin %", r.margin_probability, 0.2744, 0.01, 100);
        } else if (rho == -0.6) {
            c.near(tag + " margin %", r.margin_probability, 0.2576, 0.01, 100);
        } else {
            c.at_least(tag + " win %", r.win_probability, 0.9999, 100);
        }
    }
    const double secs = seconds_since(t0);
    c.check(secs <= 600.0, fmt("runtime %.1f s <= 600 s", secs));
    return c.finish();
}

// 2006 Clasico intervals under assumed confidence levels.
bool criterion4()
{
    Criterion c(4, "Clasico intervals at assumed confidences, Gaussian rho -0.6");
    struct Row {
        double conf;
        double win;
        bool win_is_bound;
        double margin;
    };
    const std::vector<Row> rows{{0.95, 0.9830, false, 0.3191},
                                {0.99, 0.9974, false, 0.2682},
                                {0.995, 0.9988, false, 0.2503},
                                {0.999, 0.9999, true, 0.1753}};
    for (const auto& row : rows) {
        const auto x = fit(35.68, 36.53, row.conf);
        const auto y = fit(34.97, 35.70, row.conf);
        const auto r = pipeline(x, y, CopulaFamily::Gaussian, -0.6, 10'000'000, 0.006);
        const std::string tag = fmt("confidence %.1f%%", row.conf * 100);
        if (row.win_is_bound) c.at_least(tag + " win %", r.win_probability, row.win - 0.003, 100);
        else c.near(tag + " win %", r.win_probability, row.win, 0.003, 100);
        c.near(tag + " margin %", r.margin_probability, row.margin, 0.015, 100);
    }
    return c.finish();
}

IntervalPair pct_pair(double a1, double b1, double a2, double b2)
{
    return {make_interval(a1 / 100, b1 / 100), make_interval(a2 / 100, b2 / 100)};
}

// Leader vs runner-up distances per method.
bool criterion5()
{
    Criterion c(5, "method distances: midpoint, lower endpoint, Hausdorff with note");
    struct Row {
        const char* method;
        IntervalPair pair;
        double midpoint, lower, lower_tol, hausdorff;
    };
    const std::vector<Row> rows{
        {"Robusto", pct_pair(35.25, 37.40, 34.24, 36.38), 1.015, 1.010, 0.01, 1.02},
        {"Clasico", pct_pair(35.68, 36.53, 34.97, 35.70), 0.770, 0.710, 0.001, 0.83},
        {"Bayesiano", pct_pair(35.77, 36.40, 35.07, 35.63), 0.735, 0.700, 0.001, 0.77},
    };
    for (const auto& row : rows) {
        const auto d = diagnose(row.pair);
        const std::string m = row.method;
        c.near(m + " midpoint pp", d.midpoint * 100, row.midpoint, 0.001);
        c.near(m + " lower endpoint pp", d.lower_endpoint * 100, row.lower, row.lower_tol);
        c.near(m + " Hausdorff pp (reported alongside)", d.hausdorff * 100, row.hausdorff, 0.001);
    }
    // The diagnostics scenario must carry the discrepancy note in its report.
    const auto rep = run_scenario(find_scenario("mx2006-hausdorff"), RunOptions{});
    bool noted = !rep.notes.empty();
    for (const auto& cr : rep.cases) noted = noted || !cr.notes.empty();
    c.check(noted, "report carries the lower-endpoint vs Hausdorff note");
    c.check(diagnose(rows[1].pair).definitions_disagree && diagnose(rows[2].pair).definitions_disagree,
            "Clasico and Bayesiano pairs flagged as disagreeing definitions");
    return c.finish();
}

// Method-vs-method lower-endpoint matrix.
bool criterion6()
{
    Criterion c(6, "method matrix of lower-endpoint distances, six cells +- 0.01");
    const Interval fch_rob = make_interval(0.3525, 0.3740), fch_cla = make_interval(0.3568, 0.3653),
                   fch_bay = make_interval(0.3577, 0.3640);
    const Interval amlo_rob = make_interval(0.3424, 0.3638), amlo_cla = make_interval(0.3497, 0.3570),
                   amlo_bay = make_interval(0.3507, 0.3563);
    struct Cell {
        const char* name;
        IntervalPair pair;
        double target;
    };
    const std::vector<Cell> cells{
        {"FCH Robusto-Clasico", {fch_rob, fch_cla}, 0.43},
        {"FCH Robusto-Bayesiano", {fch_rob, fch_bay}, 0.52},
        {"FCH Clasico-Bayesiano", {fch_cla, fch_bay}, 0.09},
        {"AMLO Robusto-Clasico", {amlo_rob, amlo_cla}, 0.73},
        {"AMLO Robusto-Bayesiano", {amlo_rob, amlo_bay}, 0.83},
        {"AMLO Clasico-Bayesiano", {amlo_cla, amlo_bay}, 0.10},
    };
    for (const auto& cell : cells) {
        c.near(std::string(cell.name) + " pp", lower_endpoint_distance(cell.pair) * 100, cell.target, 0.01);
    }
    return c.finish();
}

// Countermonotone and g_delta couplings against their closed forms.
bool criterion7()
{
    Criterion c(7, "analytic win probabilities vs Monte Carlo, 20 random marginals, n = 1e6");
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> shape(1.2, 30.0);
    std::uniform_real_distribution<double> delta_law(0.05, 0.95);
    SimulationOptions o;
    o.n = 1'000'000;
    int cm_ok = 0, gd_ok = 0;
    double worst_cm = 0.0, worst_gd = 0.0;
    for (int i = 0; i < 20; ++i) {
        const BetaParams p{shape(gen), shape(gen)};
        const Marginal law = Marginal::beta(p);
        const Cdf fx = [&](double t) { return law.cdf(t); };
        o.seed = kDefaultSeed + i;

        const auto cm = simulate(JointModel{law, law.reflected(), CopulaSpec::lower_w()}, o);
        const double cm_exact = win_prob_countermonotone(fx);
        const double cm_z = std::abs(cm.win_probability - cm_exact) / std::max(cm.win_std_error, 1.0 / o.n);
        worst_cm = std::max(worst_cm, cm_z);
        if (cm_z <= 4.0) ++cm_ok;

        double delta = delta_law(gen);
        if (std::abs(delta - 0.5) < 1e-3) delta = 0.4;
        o.seed = kDefaultSeed + 1000 + i;
        const auto gd = simulate_g_delta(law, delta, o);
        const double gd_exact = win_prob_g_delta(delta, fx);
        const double gd_z = std::abs(gd.win_probability - gd_exact) / std::max(gd.win_std_error, 1.0 / o.n);
        worst_gd = std::max(worst_gd, gd_z);
        if (gd_z <= 4.0) ++gd_ok;
    }
    c.check(cm_ok == 20, "countermonotone within 4 SE: " + std::to_string(cm_ok) + "/20" +
                             fmt(", worst %.2f SE", worst_cm));
    c.check(gd_ok == 20, "g_delta within 4 SE: " + std::to_string(gd_ok) + "/20" +
                             fmt(", worst %.2f SE", worst_gd));
    const double exact = win_prob_countermonotone([](double) { return 0.0001; });
    c.check(exact == 0.9999, fmt("F_X(1/2) = 0.0001 gives %.17g, compared with == 0.9999", exact));
    return c.finish();
}

double ks_uniform(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
    }
    return d;
}

bool criterion8()
{
    Criterion c(8, "property suites");

    // Frechet-Hoeffding sandwich.
    {
        std::mt19937_64 gen(8);
        std::uniform_real_distribution<double> theta(-50.0, 50.0), corr(-0.999, 0.999);
        int bad_specs = 0;
        for (int s = 0; s < 50; ++s) {
            CopulaSpec spec;
            if (s == 0) spec = CopulaSpec::lower_w();
            else if (s == 1) spec = CopulaSpec::upper_m();
            else if (s == 2) spec = CopulaSpec::independence();
            else if (s % 2) spec = CopulaSpec::frank(theta(gen));
            else spec = CopulaSpec::gaussian(corr(gen));
            bool ok = true;
            for (int i = 0; i <= 100 && ok; ++i) {
                for (int j = 0; j <= 100; ++j) {
                    const double u = i / 100.0, v = j / 100.0;
                    const double val = copula_cdf(u, v, spec);
                    if (val < std::max(u + v - 1, 0.0) - 1e-12 || val > std::min(u, v) + 1e-12) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) ++bad_specs;
        }
        c.check(bad_specs == 0, "sandwich on 101x101 grid for 50 random specs, violations: " +
                                    std::to_string(bad_specs));
    }

    // Marginal uniformity and calibration round trip, 1e6 draws each.
    {
        const std::size_t n = 1'000'000;
        double worst_ks = 0.0, worst_rho = 0.0;
        for (CopulaFamily fam : {CopulaFamily::Frank, CopulaFamily::Gaussian}) {
            for (double target : {-0.9, -0.5, 0.3, 0.8}) {
                const CopulaSpec spec = calibrate_to_spearman(fam, target);
                Xoshiro256 rng(kDefaultSeed);
                std::vector<double> us(n), vs(n);
                for (std::size_t k = 0; k < n; ++k) std::tie(us[k], vs[k]) = sample_pair(spec, rng);
                worst_rho = std::max(worst_rho, std::abs(empirical_spearman(us, vs) - target));
                worst_ks = std::max({worst_ks, ks_uniform(std::move(us)), ks_uniform(std::move(vs))});
            }
        }
        c.check(worst_ks <= 0.002, fmt("marginal KS at 1e6, worst %.5f <= 0.002", worst_ks));
        c.check(worst_rho <= 0.01, fmt("Spearman calibration round trip, worst %.5f <= 0.01", worst_rho));
    }

    // Beta quantile / CDF round trip.
    {
        double worst = 0.0;
        for (const BetaParams& p : {BetaParams{0.5, 0.5}, BetaParams{2, 3}, BetaParams{155.63, 66.15},
                                    BetaParams{24228.9, 9341.94}, BetaParams{1.2, 40}}) {
            for (double u = 1e-6; u < 1.0; u += 0.001237) {
                worst = std::max(worst, std::abs(beta_cdf(beta_quantile(u, p), p) - u));
            }
        }
        c.check(worst <= 1e-9, fmt("Beta quantile/CDF round trip, worst %.2e <= 1e-9", worst));
    }

    // Fit coverage identity.
    {
        double worst = 0.0;
        for (const Interval& iv : {make_interval(0.32, 0.38, 0.95), make_interval(0.265, 0.325, 0.95),
                                   make_interval(0.3577, 0.3640, 0.99), make_interval(0.3497, 0.3570, 0.999),
                                   make_interval(0.05, 0.09, 0.9), make_interval(0.40, 0.49, 0.99)}) {
            const auto r = fit_marginal(iv);
            const double cov = beta_cdf(2 * iv.high, r.marginal.params) - beta_cdf(2 * iv.low, r.marginal.params);
            worst = std::max(worst, std::abs(cov - iv.confidence));
        }
        c.check(worst <= 1e-6, fmt("fit coverage identity, worst %.2e <= 1e-6", worst));
    }

    // Seed determinism of the full report.
    {
        const Scenario s = find_scenario("contraejemplo3");
        auto report = [&](unsigned threads) {
            RunOptions o;
            o.threads = threads;
            o.n = 200'000;
            return dump_plain(to_json(run_scenario(s, o)));
        };
        const std::string a = report(1), b = report(1), d = report(4);
        c.check(a == b, "byte-identical JSON across two runs");
        c.check(a == d, "byte-identical JSON across 1 and 4 workers");
    }
    return c.finish();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app("Acceptance criteria");
    std::vector<int> which;
    app.add_option("--criterion", which, "Criterion number 1-8 (repeatable; default all)")
        ->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

    const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                      criterion5, criterion6, criterion7, criterion8};
    bool all = true;
    for (int k : which) {
        try {
            all = criteria[k - 1]() && all;
        } catch (const std::exception& e) {
            std::printf("criterion %d: FAIL  threw: %s\n", k, e.what());
            all = false;
        }
    }
    return all ? 0 : 1;
}
