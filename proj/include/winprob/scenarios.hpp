#pragma once

#include "winprob/copulas.hpp"
#include "winprob/dist.hpp"
#include "winprob/errors.hpp"
#include "winprob/interval.hpp"
#include "winprob/intervals_diag.hpp"
#include "winprob/json_text.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace winprob {

// Malformed scenario file. The message carries file, line and field.
class ScenarioError : public DomainError {
public:
    using DomainError::DomainError;
};

enum class ScenarioKind { Simulation, Countermonotone, GDelta, Diagnostics };
enum class Tier { Smoke, Golden };
enum class Provenance { Published, Derived };

std::string to_string(ScenarioKind k);
std::string to_string(Tier t);
std::string to_string(Provenance p);
Tier parse_tier(const std::string& s);

// One expected value. Numeric targets are either a point with a tolerance or
// a lower bound ("99.99+" cells); categorical targets use `text`.
struct Expectation {
    std::optional<double> value;
    std::optional<double> at_least;
    double tolerance = 0.0;
    std::optional<std::string> text;
    Provenance provenance = Provenance::Derived;
    std::string source;
};

// Law of X on [0, 1] for the countermonotone and g_delta constructions.
struct XLaw {
    bool uniform = true;
    BetaParams params{1.0, 1.0};
};

struct ScenarioCase {
    std::string label;
    // Simulation overrides of the scenario-level settings.
    std::optional<double> rho;
    std::optional<double> confidence;
    std::optional<Interval> leader;
    std::optional<Interval> runner_up;
    // Countermonotone / g_delta.
    std::optional<double> fx_half;
    std::optional<XLaw> x_law;
    std::optional<double> delta;
    // Diagnostics.
    std::optional<Interval> first;
    std::optional<Interval> second;
    // Keyed by metric name: win, margin, hausdorff, lower_endpoint, midpoint, overlap.
    std::map<std::string, Expectation> expect;
};

struct Scenario {
    int schema = 1;
    std::string id;
    std::string description;
    ScenarioKind kind = ScenarioKind::Simulation;
    // Units of interval endpoints (and diagnostic distances) in the file.
    // In memory intervals are always fractions.
    bool percent_units = false;
    std::optional<Interval> leader;
    std::optional<Interval> runner_up;
    std::optional<double> confidence;
    std::optional<CopulaFamily> copula;
    std::optional<double> rho;
    std::optional<double> margin_threshold;
    std::size_t n_golden = 1'000'000;
    std::size_t n_smoke = 100'000;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> plot_case;
    std::vector<ScenarioCase> cases;
    std::vector<std::string> notes;
    // Reference values for reporting only, never used as inputs.
    std::map<std::string, std::string> annotations;

    // Spearman targets of the simulation cases, in order.
    std::vector<double> rho_grid() const;
};

// Parse scenario text; `origin` names the source in error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);
// Canonical YAML; parse_scenario(serialize(s)) reproduces s.
std::string serialize(const Scenario& s);

struct CatalogEntry {
    std::string id;
    std::string description;
    std::string path;
};

// Directory holding the bundled scenarios (WINPROB_SCENARIO_DIR env var
// overrides the compiled-in location).
std::string scenario_dir();
std::vector<CatalogEntry> list_scenarios();
// Resolves a bundled id or a path to a scenario file. Throws ScenarioError
// listing the catalog when neither matches.
Scenario find_scenario(const std::string& id_or_path);

struct Check {
    std::string metric;
    double computed = 0.0;
    std::string computed_text;
    Expectation expected;
    double deviation = 0.0;
    bool pass = true;
};

struct CaseReport {
    std::string label;
    // Inputs and by-products worth reporting (rho, theta, fitted shapes...).
    std::vector<std::pair<std::string, double>> values;
    std::vector<Check> checks;
    std::vector<std::string> notes;
};

struct ScenarioReport {
    std::string id;
    std::string description;
    ScenarioKind kind = ScenarioKind::Simulation;
    Tier tier = Tier::Smoke;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<CaseReport> cases;
    std::vector<std::string> notes;
    std::map<std::string, std::string> annotations;

    bool all_pass() const;
    std::size_t failures() const;
};

struct RunOptions {
    Tier tier = Tier::Smoke;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    unsigned threads = 0;
    // When set, the (x, y) draws of the plot case are written here as CSV.
    std::optional<std::string> dump_samples;
};

ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts);

Json to_json(const ScenarioReport& r);
std::string render_text(const ScenarioReport& r);

} // namespace winprob
