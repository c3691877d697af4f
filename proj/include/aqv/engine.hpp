#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqv/confidence.hpp"
#include "aqv/harness.hpp"
#include "aqv/heuristic.hpp"
#include "aqv/model.hpp"
#include "aqv/pmc.hpp"
#include "aqv/props.hpp"

namespace aqv {

class EngineError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class Strategy { Veracity, Uniform };

struct EngineConfig {
    double alpha = 0.95;
    Rational budget = 0;
    Rational rbudget = 0;
    HeuristicConfig heuristic;
    BoundOptions bounds;
    PmcOptions pmc;
    Strategy strategy = Strategy::Veracity;
};

struct Problem {
    ModelBundle bundle;
    std::vector<Requirement> requirements;
};

/// u < bound style check for the requirement's relation.
bool interval_satisfies(Relation rel, double lo, double hi, double bound);
bool interval_violates(Relation rel, double lo, double hi, double bound);

struct RequirementRound {
    std::string id;
    double lo = 0;
    double hi = 0;
    /// Round in which the requirement was decided satisfied.
    std::optional<std::size_t> decided_round;
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<RequirementRound> requirements;
    /// Empty when the round ended before testing.
    std::vector<std::uint64_t> nobs;
    std::vector<Rational> round_cost;
    std::vector<Rational> cumulative_cost;
    Rational total_cost = 0;
    double wall_ms = 0;
    bool tested() const { return !nobs.empty(); }
};

struct Verdict {
    enum class Kind { AllSatisfied, Violated, BudgetExhausted };
    Kind kind = Kind::BudgetExhausted;
    std::size_t round = 0;
    Rational total_cost = 0;
    std::string violated;
    std::vector<std::string> undecided;
};

std::string to_string(Verdict::Kind k);

struct RunResult {
    Verdict verdict;
    std::vector<RoundRecord> rounds;
    std::vector<std::string> warnings;
    /// Rounds that ran tests.
    std::size_t testing_rounds = 0;
};

/// ceil(budget / rbudget).
std::size_t max_rounds(const Rational& budget, const Rational& rbudget);

/// The verification loop. Tester failures surface as TesterError.
RunResult run(const Problem& problem, Tester& tester, const EngineConfig& cfg);

/// Same loop with the even split of every round budget.
RunResult run_baseline(const Problem& problem, Tester& tester, EngineConfig cfg);

/// rounds_requirements.csv, rounds_components.csv and verdict.json in dir.
void write_run_outputs(const RunResult& result, const Problem& problem, const std::string& dir);

std::string verdict_json(const Verdict& v);

}  // namespace aqv
