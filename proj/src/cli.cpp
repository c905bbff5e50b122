#include "winprob/cli.hpp"

#include "winprob/copulas.hpp"
#include "winprob/errors.hpp"
#include "winprob/intervals_diag.hpp"
#include "winprob/joint_engine.hpp"
#include "winprob/json_text.hpp"
#include "winprob/marginal_fit.hpp"
#include "winprob/scenarios.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace winprob::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Text, Json, Csv };

struct Common {
    std::string units = "auto";
    std::string format = "text";
    std::string seed = std::to_string(kDefaultSeed);
    unsigned threads = 0;
};

Format parse_format(const std::string& s)
{
    if (s == "text") return Format::Text;
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw UsageError("--format must be text, json or csv");
}

std::uint64_t parse_seed(const std::string& s)
{
    if (s == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw UsageError("--seed must be a non-negative integer or 'random'");
    }
    return v;
}

std::pair<double, double> parse_pair(const std::string& s, const std::string& flag)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError(flag + " expects LOW,HIGH");
    auto num = [&](std::string_view t) {
        while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
        double v = 0.0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc{} || r.ptr != t.data() + t.size()) {
            throw UsageError(flag + ": '" + s + "' is not LOW,HIGH");
        }
        return v;
    };
    const std::string_view sv(s);
    return {num(sv.substr(0, comma)), num(sv.substr(comma + 1))};
}

// Percent vs fraction is decided once per invocation from every interval
// endpoint given: any value above 1 means the whole call is in percent.
double unit_scale(const std::string& units, std::initializer_list<std::pair<double, double>> pairs)
{
    if (units == "percent") return 100.0;
    if (units == "fraction") return 1.0;
    if (units != "auto") throw UsageError("--units must be percent, fraction or auto");
    for (const auto& [a, b] : pairs) {
        if (a > 1.0 || b > 1.0) return 100.0;
    }
    return 1.0;
}

double parse_confidence(double c)
{
    if (c > 1.0) c /= 100.0;
    if (!(c > 0.0 && c < 1.0)) throw UsageError("--confidence must lie in (0, 1) or (0, 100)");
    return c;
}

Interval to_interval(std::pair<double, double> p, double scale, double confidence)
{
    Interval iv{p.first / scale, p.second / scale, confidence};
    iv.validate();
    return iv;
}

std::string f4(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string sci(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void emit_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i].first;
    out << "\n";
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i].second;
    out << "\n";
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

Json interval_json(const Interval& iv, double scale)
{
    Json j = Json::object();
    j["low"] = iv.low * scale;
    j["high"] = iv.high * scale;
    j["confidence"] = iv.confidence;
    return j;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string interval;
    double confidence = 0.95;
};

int cmd_fit(const FitArgs& a, const Common& common, std::ostream& out)
{
    const auto fmt = parse_format(common.format);
    const auto pair = parse_pair(a.interval, "--interval");
    const double scale = unit_scale(common.units, {pair});
    const Interval iv = to_interval(pair, scale, parse_confidence(a.confidence));
    const FitReport r = fit_marginal(iv);
    const double res_low = std::abs(r.achieved_low_quantile - iv.low);
    const double res_high = std::abs(r.achieved_high_quantile - iv.high);

    if (fmt == Format::Json) {
        Json j = Json::object();
        j["schema_version"] = kJsonSchemaVersion;
        j["command"] = "fit";
        j["units"] = scale == 100.0 ? "percent" : "fraction";
        j["interval"] = interval_json(iv, scale);
        j["alpha"] = r.marginal.params.alpha;
        j["beta"] = r.marginal.params.beta;
        j["achieved_low"] = r.achieved_low_quantile * scale;
        j["achieved_high"] = r.achieved_high_quantile * scale;
        j["low_residual"] = res_low;
        j["high_residual"] = res_high;
        j["objective"] = r.objective_value;
        j["iterations"] = r.iterations;
        j["coverage"] = r.coverage;
        out << dump_plain(j) << "\n";
    } else if (fmt == Format::Csv) {
        emit_csv(out, {{"low", plain_decimal(iv.low * scale)},
                       {"high", plain_decimal(iv.high * scale)},
                       {"confidence", plain_decimal(iv.confidence)},
                       {"alpha", plain_decimal(r.marginal.params.alpha)},
                       {"beta", plain_decimal(r.marginal.params.beta)},
                       {"achieved_low", plain_decimal(r.achieved_low_quantile * scale)},
                       {"achieved_high", plain_decimal(r.achieved_high_quantile * scale)},
                       {"low_residual", plain_decimal(res_low)},
                       {"high_residual", plain_decimal(res_high)},
                       {"objective", plain_decimal(r.objective_value)},
                       {"iterations", std::to_string(r.iterations)},
                       {"coverage", plain_decimal(r.coverage)}});
    } else {
        out << "Beta fit on [0, 1/2] for " << to_string(iv) << "\n"
            << "  alpha          " << f4(r.marginal.params.alpha) << "\n"
            << "  beta           " << f4(r.marginal.params.beta) << "\n"
            << "  low quantile   " << f4(r.achieved_low_quantile * scale) << "  (residual "
            << sci(res_low) << ")\n"
            << "  high quantile  " << f4(r.achieved_high_quantile * scale) << "  (residual "
            << sci(res_high) << ")\n"
            << "  coverage       " << f4(r.coverage) << "\n"
            << "  objective      " << sci(r.objective_value) << " after " << r.iterations
            << " iterations\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct WinprobArgs {
    std::string leader;
    std::string runner_up;
    double confidence = 0.95;
    std::string copula = "gaussian";
    double rho = 0.0;
    std::size_t samples = 1'000'000;
    double margin = kDefaultMarginThreshold;
    std::string dump_samples;
};

int cmd_winprob(const WinprobArgs& a, const Common& common, std::ostream& out)
{
    const auto fmt = parse_format(common.format);
    const auto lp = parse_pair(a.leader, "--leader");
    const auto rp = parse_pair(a.runner_up, "--runner-up");
    const double scale = unit_scale(common.units, {lp, rp});
    const double conf = parse_confidence(a.confidence);
    const Interval lead = to_interval(lp, scale, conf);
    const Interval run = to_interval(rp, scale, conf);
    if (!(a.margin > 0.0 && a.margin < 1.0)) throw UsageError("--margin is a vote share in (0, 1)");
    CopulaFamily family;
    try {
        family = parse_copula_family(a.copula);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (a.samples == 0) throw UsageError("--samples must be >= 1");
    const std::uint64_t seed = parse_seed(common.seed);

    const FitReport fx = fit_marginal(lead);
    const FitReport fy = fit_marginal(run);
    const CopulaSpec copula = calibrate_to_spearman(family, a.rho);
    SimulationOptions so;
    so.n = a.samples;
    so.seed = seed;
    so.margin_threshold = a.margin;
    so.threads = common.threads;
    so.keep_samples = !a.dump_samples.empty();
    const auto res = simulate(JointModel::scaled(fx.marginal, fy.marginal, copula), so);
    if (!a.dump_samples.empty()) {
        std::ofstream f(a.dump_samples);
        if (!f) throw UsageError("cannot write " + a.dump_samples);
        write_samples_csv(f, res.x, res.y);
    }
    const auto overlap = to_string(classify_overlap({lead, run}));

    if (fmt == Format::Json) {
        Json j = Json::object();
        j["schema_version"] = kJsonSchemaVersion;
        j["command"] = "winprob";
        j["units"] = scale == 100.0 ? "percent" : "fraction";
        j["leader"] = interval_json(lead, scale);
        j["runner_up"] = interval_json(run, scale);
        j["overlap"] = overlap;
        j["copula"] = to_string(copula.family);
        j["theta"] = copula.theta;
        j["rho_target"] = a.rho;
        j["leader_alpha"] = fx.marginal.params.alpha;
        j["leader_beta"] = fx.marginal.params.beta;
        j["runner_up_alpha"] = fy.marginal.params.alpha;
        j["runner_up_beta"] = fy.marginal.params.beta;
        j["n"] = res.n;
        j["seed"] = res.seed;
        j["margin_threshold"] = res.margin_threshold;
        j["win_probability"] = res.win_probability;
        j["win_std_error"] = res.win_std_error;
        j["margin_probability"] = res.margin_probability;
        j["empirical_spearman"] = res.empirical_spearman;
        j["samples_in_simplex"] = res.samples_in_simplex;
        out << dump_plain(j) << "\n";
    } else if (fmt == Format::Csv) {
        emit_csv(out, {{"overlap", overlap},
                       {"copula", to_string(copula.family)},
                       {"theta", plain_decimal(copula.theta)},
                       {"rho_target", plain_decimal(a.rho)},
                       {"n", std::to_string(res.n)},
                       {"seed", std::to_string(res.seed)},
                       {"margin_threshold", plain_decimal(res.margin_threshold)},
                       {"win_probability", plain_decimal(res.win_probability)},
                       {"win_std_error", plain_decimal(res.win_std_error)},
                       {"margin_probability", plain_decimal(res.margin_probability)},
                       {"empirical_spearman", plain_decimal(res.empirical_spearman)}});
    } else {
        out << "leader     " << to_string(lead) << "  Beta(" << f4(fx.marginal.params.alpha) << ", "
            << f4(fx.marginal.params.beta) << ")\n"
            << "runner-up  " << to_string(run) << "  Beta(" << f4(fy.marginal.params.alpha) << ", "
            << f4(fy.marginal.params.beta) << ")\n"
            << "copula     " << to_string(copula) << " (Spearman target " << f4(a.rho) << ")\n"
            << "samples    " << res.n << ", seed " << res.seed << "\n\n"
            << "interval overlap      " << overlap << "\n"
            << "P(leader wins)        " << f4(res.win_probability) << "  (std error "
            << f4(res.win_std_error) << ")\n"
            << "P(|X - Y| < " << f4(res.margin_threshold) << ")  " << f4(res.margin_probability) << "\n"
            << "empirical Spearman    " << f4(res.empirical_spearman) << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct HausdorffArgs {
    std::string first;
    std::string second;
};

int cmd_hausdorff(const HausdorffArgs& a, const Common& common, std::ostream& out)
{
    const auto fmt = parse_format(common.format);
    const auto p1 = parse_pair(a.first, "--first");
    const auto p2 = parse_pair(a.second, "--second");
    const double scale = unit_scale(common.units, {p1, p2});
    const IntervalPair pair{to_interval(p1, scale, 0.95), to_interval(p2, scale, 0.95)};
    const auto d = diagnose(pair);
    const std::string unit = scale == 100.0 ? "percentage points" : "fraction";
    std::string note;
    if (d.definitions_disagree) {
        note = "lower-endpoint distance differs from the Hausdorff distance max(|a1 - a2|, |b1 - b2|)";
    } else if (d.hausdorff == 0.0) {
        note = "identical intervals (" + to_string(d.overlap) + ")";
    }

    if (fmt == Format::Json) {
        Json j = Json::object();
        j["schema_version"] = kJsonSchemaVersion;
        j["command"] = "hausdorff";
        j["units"] = scale == 100.0 ? "percent" : "fraction";
        j["hausdorff"] = d.hausdorff * scale;
        j["lower_endpoint_distance"] = d.lower_endpoint * scale;
        j["midpoint_distance"] = d.midpoint * scale;
        j["overlap"] = to_string(d.overlap);
        j["definitions_disagree"] = d.definitions_disagree;
        if (!note.empty()) j["note"] = note;
        out << dump_plain(j) << "\n";
    } else if (fmt == Format::Csv) {
        emit_csv(out, {{"hausdorff", plain_decimal(d.hausdorff * scale)},
                       {"lower_endpoint_distance", plain_decimal(d.lower_endpoint * scale)},
                       {"midpoint_distance", plain_decimal(d.midpoint * scale)},
                       {"overlap", to_string(d.overlap)},
                       {"definitions_disagree", d.definitions_disagree ? "true" : "false"}});
    } else {
        out << "distances in " << unit << "\n"
            << "  hausdorff                " << f4(d.hausdorff * scale) << "\n"
            << "  lower-endpoint distance  " << f4(d.lower_endpoint * scale) << "\n"
            << "  midpoint distance        " << f4(d.midpoint * scale) << "\n"
            << "  overlap                  " << to_string(d.overlap) << "\n";
        if (!note.empty()) out << "note: " << note << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
    std::string scenario;
    std::string tier = "smoke";
    std::size_t samples = 0;
    std::string dump_samples;
};

int cmd_reproduce(const ReproduceArgs& a, const Common& common, std::ostream& out)
{
    const auto fmt = parse_format(common.format);
    RunOptions opts;
    try {
        opts.tier = parse_tier(a.tier);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    opts.seed = parse_seed(common.seed);
    if (a.samples) opts.n = a.samples;
    opts.threads = common.threads;
    if (!a.dump_samples.empty()) opts.dump_samples = a.dump_samples;
    const Scenario s = find_scenario(a.scenario);
    const auto report = run_scenario(s, opts);

    if (fmt == Format::Json) {
        out << dump_plain(to_json(report)) << "\n";
    } else if (fmt == Format::Csv) {
        out << "case,metric,computed,expected,at_least,tolerance,deviation,provenance,pass\n";
        for (const auto& c : report.cases) {
            for (const auto& chk : c.checks) {
                const auto& e = chk.expected;
                out << csv_field(c.label) << "," << chk.metric << ","
                    << (chk.computed_text.empty() ? plain_decimal(chk.computed) : chk.computed_text) << ","
                    << (e.text ? *e.text : e.value ? plain_decimal(*e.value) : "") << ","
                    << (e.at_least ? plain_decimal(*e.at_least) : "") << "," << plain_decimal(e.tolerance)
                    << "," << plain_decimal(chk.deviation) << "," << to_string(e.provenance) << ","
                    << (chk.pass ? "true" : "false") << "\n";
            }
        }
    } else {
        out << render_text(report);
    }
    // Only the golden tier gates; smoke runs use too few draws for the
    // published tolerances and are informational.
    return opts.tier == Tier::Golden && !report.all_pass() ? kGoldenFailure : kOk;
}

int cmd_list(const Common& common, std::ostream& out)
{
    const auto fmt = parse_format(common.format);
    const auto catalog = list_scenarios();
    if (fmt == Format::Json) {
        Json arr = Json::array();
        for (const auto& e : catalog) {
            Json j = Json::object();
            j["id"] = e.id;
            j["description"] = e.description;
            j["path"] = e.path;
            arr.push_back(j);
        }
        Json doc = Json::object();
        doc["schema_version"] = kJsonSchemaVersion;
        doc["command"] = "list";
        doc["scenarios"] = arr;
        out << dump_plain(doc) << "\n";
    } else if (fmt == Format::Csv) {
        out << "id,description\n";
        for (const auto& e : catalog) out << e.id << "," << csv_field(e.description) << "\n";
    } else {
        std::size_t w = 0;
        for (const auto& e : catalog) w = std::max(w, e.id.size());
        for (const auto& e : catalog) out << e.id << std::string(w + 2 - e.id.size(), ' ') << e.description << "\n";
    }
    return kOk;
}

void add_common(CLI::App* sub, Common& c, bool simulation)
{
    sub->add_option("--units", c.units, "Interval units: percent, fraction or auto (values > 1 are percent)")
        ->check(CLI::IsMember({"percent", "fraction", "auto"}));
    sub->add_option("--format", c.format, "Output format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    if (simulation) {
        sub->add_option("--seed", c.seed, "Seed (non-negative integer) or 'random'");
        sub->add_option("--threads", c.threads, "Worker threads (default: WINPROB_THREADS or all cores)");
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Win probability of a leading candidate from two interval estimates", "winprob"};
    app.require_subcommand(1);

    Common common;
    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a Beta marginal on [0, 1/2] to an interval");
    fit_cmd->add_option("--interval", fit.interval, "LOW,HIGH")->required();
    fit_cmd->add_option("--confidence", fit.confidence, "Interval confidence, e.g. 0.95");
    add_common(fit_cmd, common, false);

    WinprobArgs win;
    auto* win_cmd = app.add_subcommand("winprob", "Fit, calibrate and simulate P(leader > runner-up)");
    win_cmd->add_option("--leader", win.leader, "LOW,HIGH of the leader")->required();
    win_cmd->add_option("--runner-up", win.runner_up, "LOW,HIGH of the runner-up")->required();
    win_cmd->add_option("--confidence", win.confidence, "Confidence of both intervals");
    win_cmd->add_option("--copula", win.copula, "frank, gaussian, w, m or independence");
    win_cmd->add_option("--rho", win.rho, "Spearman correlation target")->check(CLI::Range(-1.0, 1.0));
    win_cmd->add_option("--samples", win.samples, "Monte Carlo draws");
    win_cmd->add_option("--margin", win.margin, "Margin threshold as a vote share");
    win_cmd->add_option("--dump-samples", win.dump_samples, "Write the draws as CSV to this path");
    add_common(win_cmd, common, true);

    HausdorffArgs haus;
    auto* haus_cmd = app.add_subcommand("hausdorff", "Distances and overlap between two intervals");
    haus_cmd->add_option("--first", haus.first, "LOW,HIGH")->required();
    haus_cmd->add_option("--second", haus.second, "LOW,HIGH")->required();
    add_common(haus_cmd, common, false);

    ReproduceArgs rep;
    auto* rep_cmd = app.add_subcommand("reproduce", "Run a bundled scenario against its expected values");
    rep_cmd->add_option("--scenario", rep.scenario, "Scenario id or path to a scenario file")->required();
    rep_cmd->add_option("--tier", rep.tier, "smoke (1e5 draws, informational) or golden (gating)")
        ->check(CLI::IsMember({"smoke", "golden"}));
    rep_cmd->add_option("--samples", rep.samples, "Override the tier's draw count");
    rep_cmd->add_option("--dump-samples", rep.dump_samples, "Write the plot case's draws as CSV");
    add_common(rep_cmd, common, true);

    auto* list_cmd = app.add_subcommand("list", "List bundled scenarios");
    list_cmd->add_option("--format", common.format, "Output format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, common, out);
        if (*win_cmd) return cmd_winprob(win, common, out);
        if (*haus_cmd) return cmd_hausdorff(haus, common, out);
        if (*rep_cmd) return cmd_reproduce(rep, common, out);
        if (*list_cmd) return cmd_list(common, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

} // namespace winprob::cli
