#include "winprob/scenarios.hpp"

#include "winprob/joint_engine.hpp"
#include "winprob/marginal_fit.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#ifndef WINPROB_SCENARIO_DIR
#define WINPROB_SCENARIO_DIR "scenarios"
#endif

namespace winprob {

std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::Simulation: return "simulation";
    case ScenarioKind::Countermonotone: return "countermonotone";
    case ScenarioKind::GDelta: return "g_delta";
    case ScenarioKind::Diagnostics: return "diagnostics";
    }
    return "?";
}

std::string to_string(Tier t) { return t == Tier::Golden ? "golden" : "smoke"; }

std::string to_string(Provenance p) { return p == Provenance::Published ? "published" : "derived"; }

Tier parse_tier(const std::string& s)
{
    if (s == "smoke") return Tier::Smoke;
    if (s == "golden") return Tier::Golden;
    throw DomainError("tier must be smoke or golden, got '" + s + "'");
}

std::vector<double> Scenario::rho_grid() const
{
    std::vector<double> out;
    if (kind != ScenarioKind::Simulation) return out;
    for (const auto& c : cases) {
        if (c.rho) out.push_back(*c.rho);
        else if (rho) out.push_back(*rho);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg) const
    {
        std::ostringstream os;
        os << origin_;
        const auto mark = at.Mark();
        if (mark.line >= 0) os << ':' << mark.line + 1;
        os << ": field '" << field << "': " << msg;
        throw ScenarioError(os.str());
    }

    void require_map(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsMap()) fail(n, field, "expected a mapping");
    }

    void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) const
    {
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                fail(kv.first, where.empty() ? key : where + "." + key, "unknown field");
            }
        }
    }

    YAML::Node need(const YAML::Node& parent, const char* key, const std::string& field) const
    {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, field, "missing required field");
        return n;
    }

    double number(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) fail(n, field, "expected a number");
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n, field, "must be finite");
            return v;
        } catch (const YAML::Exception&) {
            fail(n, field, "expected a number, got '" + n.Scalar() + "'");
        }
    }

    std::string text(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) fail(n, field, "expected a string");
        return n.Scalar();
    }

    std::uint64_t count(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) fail(n, field, "expected a non-negative integer");
        try {
            return n.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(n, field, "expected a non-negative integer, got '" + n.Scalar() + "'");
        }
    }

    Interval interval(const YAML::Node& n, const std::string& field, double unit,
                      double confidence) const
    {
        require_map(n, field);
        check_keys(n, field, {"low", "high"});
        Interval iv{number(need(n, "low", field + ".low"), field + ".low") / unit,
                    number(need(n, "high", field + ".high"), field + ".high") / unit, confidence};
        try {
            iv.validate();
        } catch (const DomainError& e) {
            fail(n, field, e.what());
        }
        return iv;
    }

    double probability(const YAML::Node& n, const std::string& field, bool open) const
    {
        const double v = number(n, field);
        const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
        if (!ok) fail(n, field, open ? "must lie in (0, 1)" : "must lie in [0, 1]");
        return v;
    }

private:
    std::string origin_;
};

Expectation parse_expectation(const Reader& r, const YAML::Node& n, const std::string& field)
{
    r.require_map(n, field);
    r.check_keys(n, field, {"value", "at_least", "tolerance", "text", "provenance", "source"});
    Expectation e;
    if (n["value"]) e.value = r.number(n["value"], field + ".value");
    if (n["at_least"]) e.at_least = r.number(n["at_least"], field + ".at_least");
    if (n["text"]) e.text = r.text(n["text"], field + ".text");
    const int targets = int(e.value.has_value()) + int(e.at_least.has_value()) + int(e.text.has_value());
    if (targets != 1) r.fail(n, field, "exactly one of value, at_least, text is required");
    if (n["tolerance"]) {
        e.tolerance = r.number(n["tolerance"], field + ".tolerance");
        if (e.tolerance < 0.0) r.fail(n["tolerance"], field + ".tolerance", "must be >= 0");
    } else if (e.value) {
        r.fail(n, field + ".tolerance", "missing required field");
    }
    const auto prov = r.text(r.need(n, "provenance", field + ".provenance"), field + ".provenance");
    if (prov == "published") e.provenance = Provenance::Published;
    else if (prov == "derived") e.provenance = Provenance::Derived;
    else r.fail(n["provenance"], field + ".provenance", "must be published or derived");
    e.source = r.text(r.need(n, "source", field + ".source"), field + ".source");
    return e;
}

XLaw parse_x_law(const Reader& r, const YAML::Node& n, const std::string& field)
{
    if (n.IsScalar()) {
        if (n.Scalar() != "uniform") r.fail(n, field, "expected 'uniform' or {alpha, beta}");
        return {};
    }
    r.require_map(n, field);
    r.check_keys(n, field, {"alpha", "beta"});
    XLaw law;
    law.uniform = false;
    law.params = {r.number(r.need(n, "alpha", field + ".alpha"), field + ".alpha"),
                  r.number(r.need(n, "beta", field + ".beta"), field + ".beta")};
    try {
        law.params.validate();
    } catch (const DomainError& e) {
        r.fail(n, field, e.what());
    }
    return law;
}

const std::set<std::string> kSimulationMetrics{"win", "margin"};
const std::set<std::string> kAnalyticMetrics{"win"};
const std::set<std::string> kDiagnosticMetrics{"hausdorff", "lower_endpoint", "midpoint", "overlap"};

ScenarioCase parse_case(const Reader& r, const YAML::Node& n, const std::string& field,
                        const Scenario& s, double unit)
{
    r.require_map(n, field);
    ScenarioCase c;
    c.label = r.text(r.need(n, "label", field + ".label"), field + ".label");
    const std::set<std::string>* metrics = nullptr;
    switch (s.kind) {
    case ScenarioKind::Simulation: {
        r.check_keys(n, field, {"label", "rho", "confidence", "leader", "runner_up", "expect"});
        if (n["confidence"]) c.confidence = r.probability(n["confidence"], field + ".confidence", true);
        const double conf = c.confidence.value_or(s.confidence.value_or(0.95));
        if (n["rho"]) {
            c.rho = r.number(n["rho"], field + ".rho");
            if (*c.rho < -1.0 || *c.rho > 1.0) r.fail(n["rho"], field + ".rho", "must lie in [-1, 1]");
        } else if (!s.rho) {
            r.fail(n, field + ".rho", "missing and no scenario-level rho");
        }
        if (n["leader"]) c.leader = r.interval(n["leader"], field + ".leader", unit, conf);
        if (n["runner_up"]) c.runner_up = r.interval(n["runner_up"], field + ".runner_up", unit, conf);
        metrics = &kSimulationMetrics;
        break;
    }
    case ScenarioKind::Countermonotone:
    case ScenarioKind::GDelta: {
        if (s.kind == ScenarioKind::GDelta) {
            r.check_keys(n, field, {"label", "delta", "fx_half", "x_law", "expect"});
            c.delta = r.probability(r.need(n, "delta", field + ".delta"), field + ".delta", true);
        } else {
            r.check_keys(n, field, {"label", "fx_half", "x_law", "expect"});
        }
        if (n["fx_half"]) c.fx_half = r.probability(n["fx_half"], field + ".fx_half", false);
        if (n["x_law"]) c.x_law = parse_x_law(r, n["x_law"], field + ".x_law");
        if (c.fx_half.has_value() == c.x_law.has_value()) {
            r.fail(n, field, "exactly one of fx_half, x_law is required");
        }
        metrics = &kAnalyticMetrics;
        break;
    }
    case ScenarioKind::Diagnostics:
        r.check_keys(n, field, {"label", "first", "second", "expect"});
        c.first = r.interval(r.need(n, "first", field + ".first"), field + ".first", unit, 0.95);
        c.second = r.interval(r.need(n, "second", field + ".second"), field + ".second", unit, 0.95);
        metrics = &kDiagnosticMetrics;
        break;
    }
    if (const auto ex = n["expect"]) {
        r.require_map(ex, field + ".expect");
        for (const auto& kv : ex) {
            const auto key = kv.first.as<std::string>();
            const auto f = field + ".expect." + key;
            if (!metrics->count(key)) r.fail(kv.first, f, "unknown metric for " + to_string(s.kind));
            c.expect[key] = parse_expectation(r, kv.second, f);
        }
    }
    return c;
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    const Reader r(origin);
    if (!root.IsMap()) r.fail(root, "<root>", "expected a mapping");
    r.check_keys(root, "",
                 {"schema", "id", "kind", "description", "units", "leader", "runner_up", "confidence",
                  "copula", "rho", "margin_threshold", "n", "seed", "plot_case", "cases", "notes",
                  "annotations"});

    Scenario s;
    s.schema = static_cast<int>(r.count(r.need(root, "schema", "schema"), "schema"));
    if (s.schema != 1) r.fail(root["schema"], "schema", "unsupported schema version");
    s.id = r.text(r.need(root, "id", "id"), "id");
    if (s.id.empty()) r.fail(root["id"], "id", "must not be empty");
    s.description = r.text(r.need(root, "description", "description"), "description");

    const auto kind = r.text(r.need(root, "kind", "kind"), "kind");
    if (kind == "simulation") s.kind = ScenarioKind::Simulation;
    else if (kind == "countermonotone") s.kind = ScenarioKind::Countermonotone;
    else if (kind == "g_delta") s.kind = ScenarioKind::GDelta;
    else if (kind == "diagnostics") s.kind = ScenarioKind::Diagnostics;
    else r.fail(root["kind"], "kind", "must be simulation, countermonotone, g_delta or diagnostics");

    if (root["units"]) {
        const auto u = r.text(root["units"], "units");
        if (u == "percent") s.percent_units = true;
        else if (u != "fraction") r.fail(root["units"], "units", "must be percent or fraction");
    }
    const double unit = s.percent_units ? 100.0 : 1.0;

    auto forbid = [&](const char* key) {
        if (root[key]) r.fail(root[key], key, "not used by kind " + kind);
    };
    if (s.kind == ScenarioKind::Simulation) {
        s.confidence = r.probability(r.need(root, "confidence", "confidence"), "confidence", true);
        s.leader = r.interval(r.need(root, "leader", "leader"), "leader", unit, *s.confidence);
        s.runner_up = r.interval(r.need(root, "runner_up", "runner_up"), "runner_up", unit, *s.confidence);
        const auto fam = r.text(r.need(root, "copula", "copula"), "copula");
        try {
            s.copula = parse_copula_family(fam);
        } catch (const DomainError& e) {
            r.fail(root["copula"], "copula", e.what());
        }
        if (root["rho"]) {
            s.rho = r.number(root["rho"], "rho");
            if (*s.rho < -1.0 || *s.rho > 1.0) r.fail(root["rho"], "rho", "must lie in [-1, 1]");
        }
        if (root["margin_threshold"]) {
            s.margin_threshold = r.number(root["margin_threshold"], "margin_threshold");
            if (!(*s.margin_threshold > 0.0 && *s.margin_threshold < 1.0)) {
                r.fail(root["margin_threshold"], "margin_threshold", "must lie in (0, 1)");
            }
        }
        if (root["plot_case"]) s.plot_case = r.text(root["plot_case"], "plot_case");
    } else {
        for (const char* key : {"leader", "runner_up", "confidence", "copula", "rho", "margin_threshold", "plot_case"}) {
            forbid(key);
        }
    }
    if (s.kind == ScenarioKind::Diagnostics) {
        forbid("n");
        forbid("seed");
    } else {
        const auto n = r.need(root, "n", "n");
        r.require_map(n, "n");
        r.check_keys(n, "n", {"golden", "smoke"});
        s.n_golden = r.count(r.need(n, "golden", "n.golden"), "n.golden");
        s.n_smoke = r.count(r.need(n, "smoke", "n.smoke"), "n.smoke");
        if (s.n_golden == 0) r.fail(n["golden"], "n.golden", "must be >= 1");
        if (s.n_smoke == 0) r.fail(n["smoke"], "n.smoke", "must be >= 1");
        if (root["seed"]) s.seed = r.count(root["seed"], "seed");
    }

    const auto cases = r.need(root, "cases", "cases");
    if (!cases.IsSequence() || cases.size() == 0) r.fail(cases, "cases", "expected a non-empty list");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto field = "cases[" + std::to_string(i) + "]";
        s.cases.push_back(parse_case(r, cases[i], field, s, unit));
        if (!labels.insert(s.cases.back().label).second) {
            r.fail(cases[i], field + ".label", "duplicate label '" + s.cases.back().label + "'");
        }
    }
    if (s.plot_case && !labels.count(*s.plot_case)) {
        r.fail(root["plot_case"], "plot_case", "no case labelled '" + *s.plot_case + "'");
    }
    if (const auto notes = root["notes"]) {
        if (!notes.IsSequence()) r.fail(notes, "notes", "expected a list of strings");
        for (std::size_t i = 0; i < notes.size(); ++i) {
            s.notes.push_back(r.text(notes[i], "notes[" + std::to_string(i) + "]"));
        }
    }
    if (const auto ann = root["annotations"]) {
        r.require_map(ann, "annotations");
        for (const auto& kv : ann) {
            const auto key = kv.first.as<std::string>();
            s.annotations[key] = r.text(kv.second, "annotations." + key);
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string shortest(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Undo the unit conversion without leaking 26.500000000000004 into files.
std::string in_units(double v, double unit)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v * unit);
    return shortest(std::strtod(buf, nullptr));
}

void emit_interval(YAML::Emitter& out, const Interval& iv, double unit)
{
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "low" << YAML::Value << in_units(iv.low, unit);
    out << YAML::Key << "high" << YAML::Value << in_units(iv.high, unit);
    out << YAML::EndMap;
}

void emit_expectation(YAML::Emitter& out, const Expectation& e)
{
    out << YAML::Flow << YAML::BeginMap;
    if (e.value) out << YAML::Key << "value" << YAML::Value << shortest(*e.value);
    if (e.at_least) out << YAML::Key << "at_least" << YAML::Value << shortest(*e.at_least);
    if (e.text) out << YAML::Key << "text" << YAML::Value << *e.text;
    if (e.value || e.tolerance != 0.0) {
        out << YAML::Key << "tolerance" << YAML::Value << shortest(e.tolerance);
    }
    out << YAML::Key << "provenance" << YAML::Value << to_string(e.provenance);
    out << YAML::Key << "source" << YAML::Value << YAML::DoubleQuoted << e.source;
    out << YAML::EndMap;
}

} // namespace

std::string serialize(const Scenario& s)
{
    const double unit = s.percent_units ? 100.0 : 1.0;
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema" << YAML::Value << s.schema;
    out << YAML::Key << "id" << YAML::Value << s.id;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
    out << YAML::Key << "description" << YAML::Value << s.description;
    if (s.percent_units) out << YAML::Key << "units" << YAML::Value << "percent";
    if (s.leader) {
        out << YAML::Key << "leader" << YAML::Value;
        emit_interval(out, *s.leader, unit);
    }
    if (s.runner_up) {
        out << YAML::Key << "runner_up" << YAML::Value;
        emit_interval(out, *s.runner_up, unit);
    }
    if (s.confidence) out << YAML::Key << "confidence" << YAML::Value << shortest(*s.confidence);
    if (s.copula) out << YAML::Key << "copula" << YAML::Value << to_string(*s.copula);
    if (s.rho) out << YAML::Key << "rho" << YAML::Value << shortest(*s.rho);
    if (s.margin_threshold) {
        out << YAML::Key << "margin_threshold" << YAML::Value << shortest(*s.margin_threshold);
    }
    if (s.kind != ScenarioKind::Diagnostics) {
        out << YAML::Key << "n" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "golden" << YAML::Value << s.n_golden;
        out << YAML::Key << "smoke" << YAML::Value << s.n_smoke;
        out << YAML::EndMap;
        if (s.seed) out << YAML::Key << "seed" << YAML::Value << *s.seed;
    }
    if (s.plot_case) out << YAML::Key << "plot_case" << YAML::Value << *s.plot_case;

    out << YAML::Key << "cases" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : s.cases) {
        out << YAML::BeginMap;
        out << YAML::Key << "label" << YAML::Value << c.label;
        if (c.rho) out << YAML::Key << "rho" << YAML::Value << shortest(*c.rho);
        if (c.confidence) out << YAML::Key << "confidence" << YAML::Value << shortest(*c.confidence);
        if (c.delta) out << YAML::Key << "delta" << YAML::Value << shortest(*c.delta);
        if (c.fx_half) out << YAML::Key << "fx_half" << YAML::Value << shortest(*c.fx_half);
        if (c.x_law) {
            out << YAML::Key << "x_law" << YAML::Value;
            if (c.x_law->uniform) {
                out << "uniform";
            } else {
                out << YAML::Flow << YAML::BeginMap;
                out << YAML::Key << "alpha" << YAML::Value << shortest(c.x_law->params.alpha);
                out << YAML::Key << "beta" << YAML::Value << shortest(c.x_law->params.beta);
                out << YAML::EndMap;
            }
        }
        const std::pair<const char*, const std::optional<Interval>*> ivs[] = {
            {"leader", &c.leader}, {"runner_up", &c.runner_up}, {"first", &c.first}, {"second", &c.second}};
        for (const auto& [key, iv] : ivs) {
            if (!*iv) continue;
            out << YAML::Key << key << YAML::Value;
            emit_interval(out, **iv, unit);
        }
        if (!c.expect.empty()) {
            out << YAML::Key << "expect" << YAML::Value << YAML::BeginMap;
            for (const auto& [metric, e] : c.expect) {
                out << YAML::Key << metric << YAML::Value;
                emit_expectation(out, e);
            }
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    if (!s.notes.empty()) {
        out << YAML::Key << "notes" << YAML::Value << YAML::BeginSeq;
        for (const auto& n : s.notes) out << n;
        out << YAML::EndSeq;
    }
    if (!s.annotations.empty()) {
        out << YAML::Key << "annotations" << YAML::Value << YAML::BeginMap;
        for (const auto& [k, v] : s.annotations) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Catalog

std::string scenario_dir()
{
    if (const char* env = std::getenv("WINPROB_SCENARIO_DIR"); env && *env) return env;
    return WINPROB_SCENARIO_DIR;
}

std::vector<CatalogEntry> list_scenarios()
{
    namespace fs = std::filesystem;
    std::vector<CatalogEntry> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(scenario_dir(), ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".yaml") continue;
        const auto s = load_scenario(entry.path().string());
        out.push_back({s.id, s.description, entry.path().string()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

Scenario find_scenario(const std::string& id_or_path)
{
    namespace fs = std::filesystem;
    const auto catalog = list_scenarios();
    for (const auto& e : catalog) {
        if (e.id == id_or_path) return load_scenario(e.path);
    }
    std::error_code ec;
    if (fs::is_regular_file(id_or_path, ec)) return load_scenario(id_or_path);
    std::string msg = "unknown scenario '" + id_or_path + "'; available:";
    for (const auto& e : catalog) msg += " " + e.id;
    throw ScenarioError(msg);
}

// ---------------------------------------------------------------------------
// Execution

bool ScenarioReport::all_pass() const { return failures() == 0; }

std::size_t ScenarioReport::failures() const
{
    std::size_t n = 0;
    for (const auto& c : cases) {
        for (const auto& chk : c.checks) n += chk.pass ? 0 : 1;
    }
    return n;
}

namespace {

Check evaluate(const std::string& metric, double computed, const Expectation& e)
{
    Check c;
    c.metric = metric;
    c.computed = computed;
    c.expected = e;
    if (e.value) {
        c.deviation = std::abs(computed - *e.value);
        c.pass = c.deviation <= e.tolerance;
    } else if (e.at_least) {
        c.deviation = std::max(0.0, *e.at_least - computed);
        c.pass = c.deviation <= e.tolerance;
    }
    return c;
}

Check evaluate_text(const std::string& metric, const std::string& computed, const Expectation& e)
{
    Check c;
    c.metric = metric;
    c.computed = std::nan("");
    c.computed_text = computed;
    c.expected = e;
    c.pass = e.text && *e.text == computed;
    c.deviation = c.pass ? 0.0 : 1.0;
    return c;
}

// Monte Carlo against an analytic value, within four standard errors.
Check mc_agreement(const SimulationResult& mc, double analytic)
{
    Expectation e;
    e.value = analytic;
    e.tolerance = std::max(4.0 * mc.win_std_error, 1.0 / static_cast<double>(mc.n));
    e.provenance = Provenance::Derived;
    e.source = "analytic value, 4 standard errors";
    return evaluate("win_mc", mc.win_probability, e);
}

struct FitKey {
    double low, high, confidence;
    bool operator<(const FitKey& o) const
    {
        return std::tie(low, high, confidence) < std::tie(o.low, o.high, o.confidence);
    }
};

void run_simulation(const Scenario& s, const RunOptions& opts, ScenarioReport& report)
{
    std::map<FitKey, FitReport> fits;
    auto fit = [&](Interval iv) -> const FitReport& {
        const FitKey key{iv.low, iv.high, iv.confidence};
        auto it = fits.find(key);
        if (it == fits.end()) it = fits.emplace(key, fit_marginal(iv)).first;
        return it->second;
    };

    for (const auto& c : s.cases) {
        CaseReport cr;
        cr.label = c.label;
        const double conf = c.confidence.value_or(*s.confidence);
        Interval lead = c.leader.value_or(*s.leader);
        Interval run = c.runner_up.value_or(*s.runner_up);
        lead.confidence = conf;
        run.confidence = conf;
        const double rho = c.rho.value_or(s.rho.value_or(0.0));

        const FitReport* fx;
        const FitReport* fy;
        CopulaSpec copula;
        try {
            fx = &fit(lead);
            fy = &fit(run);
            copula = calibrate_to_spearman(*s.copula, rho);
        } catch (const NumericError& e) {
            throw NumericError("scenario " + s.id + ", case '" + c.label + "': " + e.what());
        }

        SimulationOptions so;
        so.n = report.n;
        so.seed = report.seed;
        so.margin_threshold = s.margin_threshold.value_or(kDefaultMarginThreshold);
        so.threads = opts.threads;
        const bool plot = opts.dump_samples && c.label == s.plot_case.value_or(s.cases.front().label);
        so.keep_samples = plot;
        const auto res = simulate(JointModel::scaled(fx->marginal, fy->marginal, copula), so);
        if (plot) {
            std::ofstream out(*opts.dump_samples);
            if (!out) throw DomainError("cannot write samples to " + *opts.dump_samples);
            write_samples_csv(out, res.x, res.y);
            report.notes.push_back("samples of case '" + c.label + "' written to " + *opts.dump_samples);
        }

        cr.values = {{"rho", rho},
                     {"theta", copula.theta},
                     {"confidence", conf},
                     {"leader_alpha", fx->marginal.params.alpha},
                     {"leader_beta", fx->marginal.params.beta},
                     {"runner_up_alpha", fy->marginal.params.alpha},
                     {"runner_up_beta", fy->marginal.params.beta},
                     {"win_probability", res.win_probability},
                     {"win_std_error", res.win_std_error},
                     {"margin_probability", res.margin_probability},
                     {"empirical_spearman", res.empirical_spearman}};
        cr.notes.push_back("copula " + to_string(copula) + "; intervals " + to_string(lead) + " vs " +
                           to_string(run) + ": " + to_string(classify_overlap({lead, run})));
        if (auto it = c.expect.find("win"); it != c.expect.end()) {
            cr.checks.push_back(evaluate("win", res.win_probability, it->second));
        }
        if (auto it = c.expect.find("margin"); it != c.expect.end()) {
            cr.checks.push_back(evaluate("margin", res.margin_probability, it->second));
        }
        report.cases.push_back(std::move(cr));
    }
}

Cdf x_cdf(const ScenarioCase& c)
{
    if (c.fx_half) {
        const double h = *c.fx_half;
        // Only F_X(1/2) enters the win probability.
        return [h](double) { return h; };
    }
    const XLaw law = *c.x_law;
    if (law.uniform) return [](double x) { return std::clamp(x, 0.0, 1.0); };
    return [law](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : beta_cdf(x, law.params); };
}

void run_analytic(const Scenario& s, ScenarioReport& report, unsigned threads)
{
    for (const auto& c : s.cases) {
        CaseReport cr;
        cr.label = c.label;
        const Cdf fx = x_cdf(c);
        const bool g = s.kind == ScenarioKind::GDelta;
        const double win = g ? win_prob_g_delta(*c.delta, fx) : win_prob_countermonotone(fx);
        if (g) cr.values.emplace_back("delta", *c.delta);
        cr.values.emplace_back("fx_half", fx(0.5));
        cr.values.emplace_back("win_probability", win);
        if (auto it = c.expect.find("win"); it != c.expect.end()) {
            cr.checks.push_back(evaluate("win", win, it->second));
        }
        if (c.x_law) {
            const Marginal x = Marginal::beta(c.x_law->params, 1.0);
            SimulationOptions so;
            so.n = report.n;
            so.seed = report.seed;
            so.threads = threads;
            const auto mc = g ? simulate_g_delta(x, *c.delta, so)
                              : simulate(JointModel{x, x.reflected(), CopulaSpec::lower_w()}, so);
            cr.values.emplace_back("win_probability_mc", mc.win_probability);
            cr.values.emplace_back("win_std_error_mc", mc.win_std_error);
            cr.checks.push_back(mc_agreement(mc, win));
        }
        report.cases.push_back(std::move(cr));
    }
}

void run_diagnostics(const Scenario& s, ScenarioReport& report)
{
    const double unit = s.percent_units ? 100.0 : 1.0;
    bool any_disagree = false;
    for (const auto& c : s.cases) {
        CaseReport cr;
        cr.label = c.label;
        const auto d = diagnose({*c.first, *c.second});
        const double values[] = {d.hausdorff * unit, d.lower_endpoint * unit, d.midpoint * unit};
        const char* names[] = {"hausdorff", "lower_endpoint", "midpoint"};
        for (int i = 0; i < 3; ++i) {
            cr.values.emplace_back(names[i], values[i]);
            if (auto it = c.expect.find(names[i]); it != c.expect.end()) {
                cr.checks.push_back(evaluate(names[i], values[i], it->second));
            }
        }
        if (auto it = c.expect.find("overlap"); it != c.expect.end()) {
            cr.checks.push_back(evaluate_text("overlap", to_string(d.overlap), it->second));
        }
        cr.notes.push_back("intervals " + to_string(d.overlap));
        if (d.definitions_disagree) {
            any_disagree = true;
            cr.notes.push_back("lower-endpoint distance " + plain_decimal(std::round(values[1] * 1e4) / 1e4) +
                               " understates the Hausdorff distance " +
                               plain_decimal(std::round(values[0] * 1e4) / 1e4));
        }
        report.cases.push_back(std::move(cr));
    }
    if (any_disagree) {
        report.notes.push_back(
            "Discrepancy: the published distance column equals |a1 - a2| (lower endpoints), while "
            "the Hausdorff distance is max(|a1 - a2|, |b1 - b2|). Both are reported; the two "
            "definitions differ whenever the upper endpoints are further apart.");
    }
}

} // namespace

ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts)
{
    ScenarioReport report;
    report.id = s.id;
    report.description = s.description;
    report.kind = s.kind;
    report.tier = opts.tier;
    report.annotations = s.annotations;
    report.notes = s.notes;
    if (s.kind != ScenarioKind::Diagnostics) {
        report.n = opts.n.value_or(opts.tier == Tier::Golden ? s.n_golden : s.n_smoke);
        report.seed = opts.seed.value_or(s.seed.value_or(kDefaultSeed));
    }
    if (opts.dump_samples && s.kind != ScenarioKind::Simulation) {
        throw DomainError("scenario " + s.id + " has no simulated samples to dump");
    }
    switch (s.kind) {
    case ScenarioKind::Simulation: run_simulation(s, opts, report); break;
    case ScenarioKind::Countermonotone:
    case ScenarioKind::GDelta: run_analytic(s, report, opts.threads); break;
    case ScenarioKind::Diagnostics: run_diagnostics(s, report); break;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

Json expectation_json(const Expectation& e)
{
    Json j = Json::object();
    if (e.value) j["value"] = *e.value;
    if (e.at_least) j["at_least"] = *e.at_least;
    if (e.text) j["text"] = *e.text;
    j["tolerance"] = e.tolerance;
    j["provenance"] = to_string(e.provenance);
    j["source"] = e.source;
    return j;
}

std::string fixed4(double v)
{
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w, bool right = false)
{
    if (s.size() >= w) return s;
    const std::string fill(w - s.size(), ' ');
    return right ? fill + s : s + fill;
}

} // namespace

Json to_json(const ScenarioReport& r)
{
    Json j = Json::object();
    j["schema_version"] = 1;
    j["id"] = r.id;
    j["description"] = r.description;
    j["kind"] = to_string(r.kind);
    j["tier"] = to_string(r.tier);
    if (r.kind != ScenarioKind::Diagnostics) {
        j["n"] = r.n;
        j["seed"] = r.seed;
    }
    Json cases = Json::array();
    for (const auto& c : r.cases) {
        Json jc = Json::object();
        jc["label"] = c.label;
        Json values = Json::object();
        for (const auto& [k, v] : c.values) values[k] = v;
        jc["values"] = values;
        Json checks = Json::array();
        for (const auto& chk : c.checks) {
            Json jk = Json::object();
            jk["metric"] = chk.metric;
            if (chk.computed_text.empty()) jk["computed"] = chk.computed;
            else jk["computed"] = chk.computed_text;
            jk["expected"] = expectation_json(chk.expected);
            jk["deviation"] = chk.deviation;
            jk["pass"] = chk.pass;
            checks.push_back(jk);
        }
        jc["checks"] = checks;
        jc["notes"] = c.notes;
        cases.push_back(jc);
    }
    j["cases"] = cases;
    j["notes"] = r.notes;
    Json ann = Json::object();
    for (const auto& [k, v] : r.annotations) ann[k] = v;
    j["annotations"] = ann;
    j["failures"] = r.failures();
    j["passed"] = r.all_pass();
    return j;
}

std::string render_text(const ScenarioReport& r)
{
    std::ostringstream os;
    os << "scenario " << r.id << " (" << to_string(r.kind) << ")\n";
    os << "  " << r.description << "\n";
    os << "  tier " << to_string(r.tier);
    if (r.kind != ScenarioKind::Diagnostics) os << ", n " << r.n << ", seed " << r.seed;
    os << "\n";

    std::size_t label_w = 5;
    for (const auto& c : r.cases) label_w = std::max(label_w, c.label.size());
    label_w += 2;

    os << "\n"
       << pad("case", label_w) << pad("metric", 16) << pad("computed", 10, true)
       << pad("expected", 12, true) << pad("tol", 9, true) << pad("dev", 9, true) << "  "
       << pad("source", 10) << "status\n";
    for (const auto& c : r.cases) {
        for (const auto& chk : c.checks) {
            const auto& e = chk.expected;
            std::string expected = e.text ? *e.text : e.at_least ? ">=" + fixed4(*e.at_least) : fixed4(*e.value);
            const std::string computed = chk.computed_text.empty() ? fixed4(chk.computed) : chk.computed_text;
            os << pad(c.label, label_w) << pad(chk.metric, 16) << pad(computed, 10, true)
               << pad(expected, 12, true) << pad(fixed4(e.tolerance), 9, true)
               << pad(fixed4(chk.deviation), 9, true) << "  " << pad(to_string(e.provenance), 10)
               << (chk.pass ? "pass" : "FAIL") << "\n";
        }
    }

    os << "\n";
    for (const auto& c : r.cases) {
        os << "[" << c.label << "]";
        for (const auto& [k, v] : c.values) os << " " << k << "=" << fixed4(v);
        os << "\n";
        for (const auto& n : c.notes) os << "    " << n << "\n";
    }
    if (!r.annotations.empty()) {
        os << "\nreference values (not used as inputs):";
        for (const auto& [k, v] : r.annotations) os << " " << k << "=" << v;
        os << "\n";
    }
    for (const auto& n : r.notes) os << "\nnote: " << n << "\n";
    const auto total = [&] {
        std::size_t t = 0;
        for (const auto& c : r.cases) t += c.checks.size();
        return t;
    }();
    os << "\n" << total - r.failures() << "/" << total << " checks passed\n";
    return os.str();
}

} // namespace winprob
