#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqv/engine.hpp"

namespace aqv {

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class TesterKind { Simulated, Script, Interactive };

struct Config {
    double alpha = 0.95;
    std::optional<Rational> budget;
    std::optional<Rational> round_budget;
    HeuristicConfig heuristic;
    std::uint64_t seed = 1;
    TesterKind tester = TesterKind::Simulated;
    std::string script_path;
    std::string truth_file;
    std::uint32_t max_bounded_k = 100;
    std::size_t max_boxes = 4096;
    std::string output_dir = "out";
};

/// `key = value` lines with `#` comments. Relative script_path and
/// truth_file are resolved against base_dir.
Config parse_config(std::string_view text, const std::string& base_dir = "");
Config load_config(const std::string& path);

/// Engine settings; throws ConfigError when budget or round_budget is missing.
EngineConfig engine_config(const Config& c);

Strategy parse_strategy(const std::string& s);

struct Scenario {
    std::string name;
    std::string model;
    std::string props;
    /// Replaces the bound of the named requirement.
    std::map<std::string, Rational> bounds;
    std::map<std::string, double> truth;
    std::uint64_t seed = 1;
};

/// JSON `{"scenarios": [...]}`; model and props paths are resolved against
/// the file's directory.
std::vector<Scenario> parse_scenarios(std::string_view text, const std::string& base_dir = "");
std::vector<Scenario> load_scenarios(const std::string& path);
std::string scenarios_json(const std::vector<Scenario>& scenarios);

struct LoadedScenario {
    Problem problem;
    Valuation truth;
};

LoadedScenario load_scenario(const Scenario& s);
/// Overwrites requirement bounds; unknown ids are an error.
void apply_bounds(std::vector<Requirement>& reqs, const std::map<std::string, Rational>& bounds);
Valuation valuation_from_map(const ParametricDtmc& m, const std::map<std::string, double>& values);

struct SynthesisOptions {
    std::size_t count = 20;
    std::uint64_t seed = 1;
    double param_lo = 0.8;
    double param_hi = 1.0;
    /// Distance between bound and true value, relative to the value.
    double narrow_lo = 0.02;
    double narrow_hi = 0.08;
    double wide_lo = 0.08;
    double wide_hi = 0.25;
};

/// Each scenario draws an outcome class (all satisfied, mixed, all
/// violated) and a margin class (narrow, wide, mixed), then random truths
/// and bounds placed around the true values accordingly.
std::vector<Scenario> synthesize_scenarios(const std::string& model_path, const std::string& props_path,
                                           const SynthesisOptions& opts);

struct CompareRow {
    std::string scenario;
    Strategy strategy = Strategy::Veracity;
    std::optional<RunResult> result;
    std::string error;
};

struct CompareSummary {
    std::size_t pairs = 0;
    double median_difference = 0;
    double superiority = 0;
};

/// Median of veracity minus uniform cost and the tie-halved probability
/// of superiority over completed pairs.
CompareSummary summarize(const std::vector<double>& veracity_costs, const std::vector<double>& uniform_costs);

/// Runs both strategies on each scenario with the scenario's seed.
std::vector<CompareRow> compare_scenarios(const std::vector<Scenario>& scenarios, const EngineConfig& cfg,
                                          unsigned threads = 0);
CompareSummary summarize(const std::vector<CompareRow>& rows);

struct SweepRow {
    Rational rbudget;
    std::size_t rounds = 0;
    Rational total_cost;
    double wall_ms = 0;
    Verdict::Kind verdict = Verdict::Kind::BudgetExhausted;
    std::vector<std::string> warnings;
};

std::vector<SweepRow> sweep_rbudget(const Problem& problem, const Valuation& truth, std::uint64_t seed,
                                    const EngineConfig& cfg, const std::vector<Rational>& values);

std::vector<Rational> default_sweep_values();
std::vector<Rational> parse_rational_list(const std::string& text);

int exit_code(Verdict::Kind k);

struct CommandLine {
    std::string model;
    std::string props;
    std::string config;
    std::string out;
    std::string truth;
    std::optional<std::uint64_t> seed;
    std::string scenarios;
    std::string strategy;
    std::string values;
    std::size_t count = 20;
};

/// Command bodies; diagnostics go to err and the return value is the exit status.
int cmd_verify(const CommandLine& cl, std::ostream& out, std::ostream& err, std::istream& in);
int cmd_evaluate(const CommandLine& cl, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandLine& cl, std::ostream& out, std::ostream& err);
int cmd_sweep_rbudget(const CommandLine& cl, std::ostream& out, std::ostream& err);
int cmd_generate_scenarios(const CommandLine& cl, std::ostream& out, std::ostream& err);

}  // namespace aqv
