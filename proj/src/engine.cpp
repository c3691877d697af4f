#include "aqv/engine.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace aqv {

bool interval_satisfies(Relation rel, double lo, double hi, double bound) {
    switch (rel) {
        case Relation::Less:
            return hi < bound;
        case Relation::LessEqual:
            return hi <= bound;
        case Relation::Greater:
            return lo > bound;
        case Relation::GreaterEqual:
            return lo >= bound;
        case Relation::Query:
            return false;
    }
    return false;
}

bool interval_violates(Relation rel, double lo, double hi, double bound) {
    switch (rel) {
        case Relation::Less:
            return lo >= bound;
        case Relation::LessEqual:
            return lo > bound;
        case Relation::Greater:
            return hi <= bound;
        case Relation::GreaterEqual:
            return hi < bound;
        case Relation::Query:
            return false;
    }
    return false;
}

std::string to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::AllSatisfied:
            return "AllSatisfied";
        case Verdict::Kind::Violated:
            return "Violated";
        case Verdict::Kind::BudgetExhausted:
            return "BudgetExhausted";
    }
    return "?";
}

std::size_t max_rounds(const Rational& budget, const Rational& rbudget) {
    const Rational q = budget / rbudget;
    mpz_class c = q.get_num() / q.get_den();
    if (Rational(c) < q) ++c;
    return c.get_ui();
}

namespace {

using Clock = std::chrono::steady_clock;

void check_config(const Problem& problem, const EngineConfig& cfg, std::vector<std::string>& warnings) {
    if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw EngineError("alpha must lie in (0,1)");
    if (cfg.budget <= 0) throw EngineError("budget must be positive");
    if (cfg.rbudget <= 0) throw EngineError("round budget must be positive");
    if (cfg.rbudget > cfg.budget) throw EngineError("round budget exceeds the overall budget");
    for (const auto& r : problem.requirements) {
        if (r.rel == Relation::Query) throw EngineError("requirement " + r.id + " has no bound");
    }
    Rational all = 0;
    for (const auto& c : problem.bundle.components) all += c.cost;
    if (cfg.rbudget < all) {
        warnings.push_back("round budget " + cfg.rbudget.get_str() + " is below the total component cost " +
                           all.get_str() + "; rounds may allocate no tests");
    }
}

}  // namespace

RunResult run(const Problem& problem, Tester& tester, const EngineConfig& cfg) {
    RunResult result;
    check_config(problem, cfg, result.warnings);
    const auto& bundle = problem.bundle;
    const auto& reqs = problem.requirements;
    const auto costs = component_costs(bundle);
    const std::size_t m = costs.size();

    const auto exprs = build_property_expressions(bundle.model, reqs, cfg.pmc);
    const auto grads =
        cfg.strategy == Strategy::Veracity ? expression_gradients(exprs) : std::vector<ExprGradient>(exprs.size());
    const auto limit = max_rounds(cfg.budget, cfg.rbudget);

    ObservationFunction obs = bundle.initial_obs;
    std::vector<std::optional<std::size_t>> decided(reqs.size());
    std::vector<PropertyInterval> intervals(reqs.size());
    std::vector<Rational> cumulative(m, Rational(0));
    Rational total = 0;
    std::vector<std::size_t> all_components(m);
    std::iota(all_components.begin(), all_components.end(), 0);

    for (std::size_t round = 1;; ++round) {
        const auto started = Clock::now();
        RoundRecord rec;
        rec.round = round;

        std::vector<PropertyExpression> open;
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            if (!decided[i]) open.push_back(exprs[i]);
        }
        const auto box = build_param_box(bundle, obs, cfg.alpha, open);
        std::optional<std::size_t> violated;
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            if (decided[i]) continue;
            intervals[i] = property_interval(exprs[i], box, cfg.alpha, cfg.bounds);
            const double b = reqs[i].bound.get_d();
            if (interval_violates(reqs[i].rel, intervals[i].lo, intervals[i].hi, b)) {
                if (!violated) violated = i;
            } else if (interval_satisfies(reqs[i].rel, intervals[i].lo, intervals[i].hi, b)) {
                decided[i] = round;
            }
        }
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            rec.requirements.push_back({reqs[i].id, intervals[i].lo, intervals[i].hi, decided[i]});
        }
        rec.cumulative_cost = cumulative;
        rec.total_cost = total;

        auto finish = [&](Verdict::Kind kind) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
            result.rounds.push_back(std::move(rec));
            result.verdict.kind = kind;
            result.verdict.round = round;
            result.verdict.total_cost = total;
            for (std::size_t i = 0; i < reqs.size(); ++i) {
                if (!decided[i] && (!violated || *violated != i)) result.verdict.undecided.push_back(reqs[i].id);
            }
            return result;
        };

        if (violated) {
            result.verdict.violated = reqs[*violated].id;
            return finish(Verdict::Kind::Violated);
        }
        if (std::all_of(decided.begin(), decided.end(), [](const auto& d) { return d.has_value(); })) {
            return finish(Verdict::Kind::AllSatisfied);
        }
        const Rational remaining = cfg.budget - total;
        if (result.testing_rounds >= limit || remaining <= 0) return finish(Verdict::Kind::BudgetExhausted);
        const Rational rb = std::min(cfg.rbudget, remaining);

        std::vector<std::uint64_t> nobs;
        if (cfg.strategy == Strategy::Uniform) {
            nobs = uniform_split(rb, costs, all_components);
        } else {
            std::set<std::string> done;
            for (std::size_t i = 0; i < reqs.size(); ++i) {
                if (decided[i]) done.insert(reqs[i].id);
            }
            nobs = allocate(rb, bundle, {reqs, intervals, grads, done}, obs, cfg.heuristic).nobs;
        }
        if (std::all_of(nobs.begin(), nobs.end(), [](auto n) { return n == 0; })) {
            return finish(Verdict::Kind::BudgetExhausted);
        }

        ObservationFunction fresh;
        rec.round_cost.assign(m, Rational(0));
        for (std::size_t j = 0; j < m; ++j) {
            if (nobs[j] == 0) continue;
            fresh = merge_observations(fresh, tester.test(j, nobs[j], round));
            rec.round_cost[j] = Rational(static_cast<unsigned long>(nobs[j])) * costs[j];
            cumulative[j] += rec.round_cost[j];
            total += rec.round_cost[j];
        }
        obs = merge_observations(obs, fresh);
        ++result.testing_rounds;
        rec.nobs = std::move(nobs);
        rec.cumulative_cost = cumulative;
        rec.total_cost = total;
        rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
        result.rounds.push_back(std::move(rec));
    }
}

RunResult run_baseline(const Problem& problem, Tester& tester, EngineConfig cfg) {
    cfg.strategy = Strategy::Uniform;
    return run(problem, tester, cfg);
}

namespace {

nlohmann::json number(const Rational& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
    return r.get_d();
}

std::string bound_text(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

std::string verdict_json(const Verdict& v) {
    nlohmann::json j;
    j["verdict"] = to_string(v.kind);
    j["round"] = v.round;
    j["total_cost"] = number(v.total_cost);
    j["undecided"] = v.undecided;
    if (v.kind == Verdict::Kind::Violated) j["violated"] = v.violated;
    return j.dump(2);
}

void write_run_outputs(const RunResult& result, const Problem& problem, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream reqs(fs::path(dir) / "rounds_requirements.csv");
    reqs << "round,req_id,lo,hi,decided\n";
    for (const auto& r : result.rounds) {
        for (const auto& q : r.requirements) {
            reqs << r.round << ',' << q.id << ',' << bound_text(q.lo) << ',' << bound_text(q.hi) << ',';
            if (q.decided_round) reqs << "decided-satisfied(round " << *q.decided_round << ")";
            reqs << '\n';
        }
    }
    std::ofstream comps(fs::path(dir) / "rounds_components.csv");
    comps << "round,component,nobs,round_cost,cumulative_cost\n";
    for (const auto& r : result.rounds) {
        if (!r.tested()) continue;
        for (std::size_t j = 0; j < r.nobs.size(); ++j) {
            comps << r.round << ',' << problem.bundle.components[j].name << ',' << r.nobs[j] << ','
                  << r.round_cost[j].get_d() << ',' << r.cumulative_cost[j].get_d() << '\n';
        }
    }
    std::ofstream verdict(fs::path(dir) / "verdict.json");
    verdict << verdict_json(result.verdict) << '\n';
    if (!reqs || !comps || !verdict) throw EngineError("cannot write outputs to '" + dir + "'");
}

}  // namespace aqv
