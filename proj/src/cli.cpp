#include "aqv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace aqv {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Rational parse_rational(const std::string& text, const std::string& key) {
    try {
        return parse_expr(text, {}).constant_value();
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' needs a number, got '" + text + "'");
    }
}

double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: '" + key + "' needs a number, got '" + text + "'");
}

std::uint64_t parse_count(const std::string& text, const std::string& key) {
    if (text.empty() || text.size() > 19 || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("config: '" + key + "' needs a non-negative integer, got '" + text + "'");
    }
    return std::stoull(text);
}

std::string resolve(const std::string& base, const std::string& p) {
    if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base) / p).lexically_normal().string();
}

std::string parent_dir(const std::string& path) {
    const auto d = fs::path(path).parent_path();
    return d.empty() ? "." : d.string();
}

std::string number_text(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

std::string cost_text(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return number_text(r.get_d());
}

std::string strategy_name(Strategy s) { return s == Strategy::Veracity ? "veracity" : "uniform"; }

}  // namespace

Config parse_config(std::string_view text, const std::string& base_dir) {
    Config c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("config: duplicate key '" + key + "'");
        if (key == "alpha") {
            c.alpha = parse_double(value, key);
            if (!(c.alpha > 0 && c.alpha < 1)) throw ConfigError("config: alpha must lie in (0,1)");
        } else if (key == "budget") {
            c.budget = parse_rational(value, key);
            if (*c.budget <= 0) throw ConfigError("config: budget must be positive");
        } else if (key == "round_budget") {
            c.round_budget = parse_rational(value, key);
            if (*c.round_budget <= 0) throw ConfigError("config: round_budget must be positive");
        } else if (key == "epsilon1") {
            c.heuristic.epsilon1 = parse_double(value, key);
            if (!(c.heuristic.epsilon1 > 0)) throw ConfigError("config: epsilon1 must be positive");
        } else if (key == "epsilon2") {
            c.heuristic.epsilon2 = parse_double(value, key);
            if (!(c.heuristic.epsilon2 > 0)) throw ConfigError("config: epsilon2 must be positive");
        } else if (key == "seed") {
            c.seed = parse_count(value, key);
        } else if (key == "tester") {
            if (value == "simulated") {
                c.tester = TesterKind::Simulated;
            } else if (value == "script") {
                c.tester = TesterKind::Script;
            } else if (value == "interactive") {
                c.tester = TesterKind::Interactive;
            } else {
                throw ConfigError("config: tester must be simulated, script or interactive");
            }
        } else if (key == "script_path") {
            c.script_path = resolve(base_dir, value);
        } else if (key == "truth_file") {
            c.truth_file = resolve(base_dir, value);
        } else if (key == "max_bounded_k") {
            const auto k = parse_count(value, key);
            if (k == 0 || k > 1'000'000) throw ConfigError("config: max_bounded_k out of range");
            c.max_bounded_k = static_cast<std::uint32_t>(k);
        } else if (key == "max_boxes") {
            c.max_boxes = parse_count(value, key);
            if (c.max_boxes == 0) throw ConfigError("config: max_boxes must be positive");
        } else if (key == "output_dir") {
            c.output_dir = value;
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), parent_dir(path));
}

EngineConfig engine_config(const Config& c) {
    if (!c.budget) throw ConfigError("config: missing key 'budget'");
    if (!c.round_budget) throw ConfigError("config: missing key 'round_budget'");
    EngineConfig e;
    e.alpha = c.alpha;
    e.budget = *c.budget;
    e.rbudget = *c.round_budget;
    e.heuristic = c.heuristic;
    e.bounds.max_boxes = c.max_boxes;
    e.pmc.max_bounded_k = c.max_bounded_k;
    return e;
}

Strategy parse_strategy(const std::string& s) {
    if (s.empty() || s == "veracity") return Strategy::Veracity;
    if (s == "uniform") return Strategy::Uniform;
    throw ConfigError("strategy must be veracity or uniform");
}

std::vector<Scenario> parse_scenarios(std::string_view text, const std::string& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario list: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("scenarios") || !doc["scenarios"].is_array()) {
        throw ConfigError("scenario list: expected an object with a 'scenarios' array");
    }
    std::vector<Scenario> out;
    std::set<std::string> names;
    for (const auto& j : doc["scenarios"]) {
        try {
            Scenario s;
            s.name = j.at("name").get<std::string>();
            s.model = resolve(base_dir, j.at("model").get<std::string>());
            s.props = resolve(base_dir, j.at("props").get<std::string>());
            if (j.contains("bounds")) {
                for (const auto& [id, v] : j["bounds"].items()) {
                    s.bounds[id] = v.is_string() ? parse_rational(v.get<std::string>(), id)
                                                 : parse_rational(number_text(v.get<double>()), id);
                }
            }
            for (const auto& [p, v] : j.at("truth").items()) s.truth[p] = v.get<double>();
            if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
            if (!names.insert(s.name).second) throw ConfigError("duplicate scenario '" + s.name + "'");
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("scenario list: ") + e.what());
        }
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read scenario list '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenarios(ss.str(), parent_dir(path));
}

std::string scenarios_json(const std::vector<Scenario>& scenarios) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : scenarios) {
        nlohmann::json j;
        j["name"] = s.name;
        j["model"] = s.model;
        j["props"] = s.props;
        nlohmann::json bounds = nlohmann::json::object();
        for (const auto& [id, b] : s.bounds) bounds[id] = b.get_str();
        j["bounds"] = bounds;
        nlohmann::json truth = nlohmann::json::object();
        for (const auto& [p, v] : s.truth) truth[p] = v;
        j["truth"] = truth;
        j["seed"] = s.seed;
        list.push_back(j);
    }
    return nlohmann::json{{"scenarios", list}}.dump(2) + "\n";
}

void apply_bounds(std::vector<Requirement>& reqs, const std::map<std::string, Rational>& bounds) {
    for (const auto& [id, b] : bounds) {
        auto it = std::find_if(reqs.begin(), reqs.end(), [&](const Requirement& r) { return r.id == id; });
        if (it == reqs.end()) throw ConfigError("bound given for unknown requirement '" + id + "'");
        if (it->kind == Requirement::Kind::Probability && (b < 0 || b > 1)) {
            throw ConfigError("bound of " + id + " must lie in [0,1]");
        }
        if (b < 0) throw ConfigError("bound of " + id + " must be non-negative");
        it->bound = b;
    }
}

Valuation valuation_from_map(const ParametricDtmc& m, const std::map<std::string, double>& values) {
    Valuation v(m.params.size(), std::nan(""));
    for (const auto& [name, x] : values) {
        const auto p = m.find_param(name);
        if (!p) throw ConfigError("truth names unknown parameter '" + name + "'");
        v[*p] = x;
    }
    for (std::size_t p = 0; p < v.size(); ++p) {
        if (std::isnan(v[p])) throw ConfigError("truth has no value for parameter '" + m.params[p] + "'");
    }
    return v;
}

LoadedScenario load_scenario(const Scenario& s) {
    LoadedScenario out{{load_model(s.model), load_requirements(s.props)}, {}};
    apply_bounds(out.problem.requirements, s.bounds);
    out.truth = valuation_from_map(out.problem.bundle.model, s.truth);
    validate_truth(out.problem.bundle, out.truth);
    return out;
}

namespace {

// Four significant decimal digits, exactly.
Rational decimal_bound(double b) {
    if (!(b > 0)) return Rational(0);
    const int e = static_cast<int>(std::floor(std::log10(b))) - 3;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(e)));
    const double digits = std::round(e >= 0 ? b / scale.get_d() : b * scale.get_d());
    Rational r = e >= 0 ? Rational(mpz_class(static_cast<long>(digits)) * scale)
                        : Rational(mpz_class(static_cast<long>(digits)), scale);
    r.canonicalize();
    return r;
}

// Per-requirement choice for a three-way class: all true, mixed, all false.
std::vector<bool> class_flags(std::size_t n, int cls, std::mt19937_64& rng) {
    std::vector<bool> f(n, cls == 0);
    if (cls != 1 || n == 0) return f;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < n; ++i) f[i] = coin(rng);
    if (n >= 2) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const auto a = pick(rng);
        auto b = pick(rng);
        while (b == a) b = pick(rng);
        f[a] = true;
        f[b] = false;
    }
    return f;
}

}  // namespace

std::vector<Scenario> synthesize_scenarios(const std::string& model_path, const std::string& props_path,
                                           const SynthesisOptions& opts) {
    const auto bundle = load_model(model_path);
    const auto reqs = load_requirements(props_path);
    const auto exprs = build_property_expressions(bundle.model, reqs);
    const auto& m = bundle.model;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> param(opts.param_lo, opts.param_hi);
    std::uniform_real_distribution<double> narrow(opts.narrow_lo, opts.narrow_hi);
    std::uniform_real_distribution<double> wide(opts.wide_lo, opts.wide_hi);
    std::uniform_int_distribution<int> three(0, 2);
    const std::string stem = fs::path(model_path).stem().string();

    std::vector<Scenario> out;
    for (std::size_t k = 0; k < opts.count; ++k) {
        Scenario s;
        std::ostringstream name;
        name << stem << '-' << std::setw(3) << std::setfill('0') << (k + 1);
        s.name = name.str();
        s.model = model_path;
        s.props = props_path;
        s.seed = rng();
        std::vector<double> values;
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) throw ConfigError("cannot draw a valid truth for " + model_path);
            Valuation v(m.params.size());
            for (auto& x : v) x = std::round(param(rng) * 1e4) / 1e4;
            try {
                validate_truth(bundle, v);
                values.clear();
                for (const auto& pe : exprs) values.push_back(eval(pe.expr, v));
            } catch (const std::exception&) {
                continue;
            }
            // relative margins need a value away from 0 and, for probabilities, from 1
            bool usable = true;
            for (std::size_t i = 0; i < reqs.size(); ++i) {
                const double x = values[i];
                if (!std::isfinite(x) || x < 1e-9) usable = false;
                if (reqs[i].kind == Requirement::Kind::Probability && x > 1 - 1e-6) usable = false;
            }
            if (!usable) continue;
            for (std::size_t p = 0; p < v.size(); ++p) s.truth[m.params[p]] = v[p];
            break;
        }
        const auto satisfied = class_flags(reqs.size(), three(rng), rng);
        const auto narrow_margin = class_flags(reqs.size(), three(rng), rng);
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            const auto& r = reqs[i];
            const double v = values[i];
            const double gap = narrow_margin[i] ? narrow(rng) : wide(rng);
            const bool upper = r.rel == Relation::Less || r.rel == Relation::LessEqual;
            // a bound above the value satisfies an upper-bound requirement
            const bool above = satisfied[i] == upper;
            double b = above ? v * (1 + gap) : v * (1 - gap);
            if (r.kind == Requirement::Kind::Probability) b = std::min(b, 1.0);
            s.bounds[r.id] = decimal_bound(b);
        }
        out.push_back(std::move(s));
    }
    return out;
}

CompareSummary summarize(const std::vector<double>& veracity_costs, const std::vector<double>& uniform_costs) {
    CompareSummary s;
    s.pairs = std::min(veracity_costs.size(), uniform_costs.size());
    if (s.pairs == 0) return s;
    std::vector<double> diff;
    double wins = 0;
    for (std::size_t i = 0; i < s.pairs; ++i) {
        diff.push_back(veracity_costs[i] - uniform_costs[i]);
        if (veracity_costs[i] < uniform_costs[i]) {
            wins += 1;
        } else if (veracity_costs[i] == uniform_costs[i]) {
            wins += 0.5;
        }
    }
    std::sort(diff.begin(), diff.end());
    const std::size_t n = diff.size();
    s.median_difference = n % 2 ? diff[n / 2] : 0.5 * (diff[n / 2 - 1] + diff[n / 2]);
    s.superiority = wins / static_cast<double>(n);
    return s;
}

std::vector<CompareRow> compare_scenarios(const std::vector<Scenario>& scenarios, const EngineConfig& cfg,
                                          unsigned threads) {
    std::vector<CompareRow> rows(2 * scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next++;
            if (k >= rows.size()) return;
            const auto& sc = scenarios[k / 2];
            auto& row = rows[k];
            row.scenario = sc.name;
            row.strategy = k % 2 == 0 ? Strategy::Veracity : Strategy::Uniform;
            try {
                const auto loaded = load_scenario(sc);
                SimulatedTester tester(loaded.problem.bundle, loaded.truth, sc.seed);
                auto c = cfg;
                c.strategy = row.strategy;
                row.result = run(loaded.problem, tester, c);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(rows.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

CompareSummary summarize(const std::vector<CompareRow>& rows) {
    std::vector<double> v;
    std::vector<double> u;
    for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
        if (!rows[k].result || !rows[k + 1].result) continue;
        v.push_back(rows[k].result->verdict.total_cost.get_d());
        u.push_back(rows[k + 1].result->verdict.total_cost.get_d());
    }
    return summarize(v, u);
}

std::vector<SweepRow> sweep_rbudget(const Problem& problem, const Valuation& truth, std::uint64_t seed,
                                    const EngineConfig& cfg, const std::vector<Rational>& values) {
    std::vector<SweepRow> rows;
    for (const auto& rb : values) {
        SimulatedTester tester(problem.bundle, truth, seed);
        auto c = cfg;
        c.rbudget = rb;
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = run(problem, tester, c);
        SweepRow row;
        row.rbudget = rb;
        row.rounds = result.testing_rounds;
        row.total_cost = result.verdict.total_cost;
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        row.verdict = result.verdict.kind;
        row.warnings = result.warnings;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Rational> default_sweep_values() {
    std::vector<Rational> v;
    for (long x = 1250; x <= 80000; x *= 2) v.emplace_back(x);
    return v;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto r = parse_rational(item, "round budget");
        if (r <= 0) throw ConfigError("round budgets must be positive");
        out.push_back(r);
    }
    if (out.empty()) throw ConfigError("empty list of round budgets");
    return out;
}

int exit_code(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::AllSatisfied:
            return 0;
        case Verdict::Kind::Violated:
            return 1;
        case Verdict::Kind::BudgetExhausted:
            return 2;
    }
    return 3;
}

namespace {

void require(const std::string& v, const char* flag) {
    if (v.empty()) throw ConfigError(std::string("missing ") + flag);
}

Config command_config(const CommandLine& cl) {
    require(cl.config, "--config");
    auto c = load_config(cl.config);
    if (cl.seed) c.seed = *cl.seed;
    if (!cl.truth.empty()) c.truth_file = cl.truth;
    if (!cl.out.empty()) c.output_dir = cl.out;
    return c;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace

int cmd_verify(const CommandLine& cl, std::ostream& out, std::ostream& err, std::istream& in) {
    return guarded(err, [&] {
        const auto cfg = command_config(cl);
        require(cl.model, "--model");
        require(cl.props, "--props");
        auto ec = engine_config(cfg);
        ec.strategy = parse_strategy(cl.strategy);
        const Problem problem{load_model(cl.model), load_requirements(cl.props)};
        std::unique_ptr<Tester> tester;
        switch (cfg.tester) {
            case TesterKind::Simulated: {
                if (cfg.truth_file.empty()) throw ConfigError("simulated testing needs truth_file or --truth");
                auto truth = load_truth(cfg.truth_file, problem.bundle.model);
                tester = std::make_unique<SimulatedTester>(problem.bundle, std::move(truth), cfg.seed);
                break;
            }
            case TesterKind::Script:
                if (cfg.script_path.empty()) throw ConfigError("script testing needs script_path");
                tester = std::make_unique<ScriptTester>(problem.bundle, cfg.script_path);
                break;
            case TesterKind::Interactive:
                tester = std::make_unique<InteractiveTester>(problem.bundle, in, out);
                break;
        }
        const auto result = run(problem, *tester, ec);
        print_warnings(result.warnings, err);
        write_run_outputs(result, problem, cfg.output_dir);
        out << verdict_json(result.verdict) << '\n';
        return exit_code(result.verdict.kind);
    });
}

int cmd_evaluate(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(cl.model, "--model");
        require(cl.props, "--props");
        std::string truth_path = cl.truth;
        PmcOptions pmc;
        if (!cl.config.empty()) {
            const auto cfg = load_config(cl.config);
            if (truth_path.empty()) truth_path = cfg.truth_file;
            pmc.max_bounded_k = cfg.max_bounded_k;
        }
        require(truth_path, "--truth");
        const auto bundle = load_model(cl.model);
        const auto reqs = load_requirements(cl.props, true);
        const auto truth = load_truth(truth_path, bundle.model);
        for (const auto& r : reqs) {
            const auto pe = property_expression(bundle.model, r, pmc);
            const double v = eval(pe.expr, truth);
            out << r.id << ' ' << std::setprecision(12) << v;
            if (r.rel != Relation::Query) {
                const double b = r.bound.get_d();
                const bool ok = interval_satisfies(r.rel, v, v, b);
                out << ' ' << (ok ? "satisfied" : "violated") << " (" << to_string(r.rel) << ' ' << r.bound.get_str()
                    << ')';
            }
            out << '\n';
        }
        return 0;
    });
}

int cmd_compare(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(cl.scenarios, "--scenarios");
        const auto cfg = command_config(cl);
        auto ec = engine_config(cfg);
        const auto scenarios = load_scenarios(cl.scenarios);
        if (scenarios.empty()) throw ConfigError("scenario list is empty");
        const auto rows = compare_scenarios(scenarios, ec);
        fs::create_directories(cfg.output_dir);
        std::ofstream csv(fs::path(cfg.output_dir) / "compare.csv");
        csv << "scenario,strategy,verdict,total_cost,rounds\n";
        for (const auto& r : rows) {
            csv << r.scenario << ',' << strategy_name(r.strategy) << ',';
            if (r.result) {
                csv << to_string(r.result->verdict.kind) << ',' << cost_text(r.result->verdict.total_cost) << ','
                    << r.result->testing_rounds << '\n';
            } else {
                csv << "error,,\n";
                err << "scenario " << r.scenario << " (" << strategy_name(r.strategy) << "): " << r.error << '\n';
            }
        }
        std::ofstream pairs(fs::path(cfg.output_dir) / "compare_pairs.csv");
        pairs << "scenario,cost_veracity,cost_uniform,difference\n";
        for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
            if (!rows[k].result || !rows[k + 1].result) continue;
            const auto& a = rows[k].result->verdict.total_cost;
            const auto& b = rows[k + 1].result->verdict.total_cost;
            pairs << rows[k].scenario << ',' << cost_text(a) << ',' << cost_text(b) << ',' << cost_text(a - b) << '\n';
        }
        const auto s = summarize(rows);
        std::ofstream summary(fs::path(cfg.output_dir) / "compare_summary.csv");
        const std::string head = "pairs,median_difference,probability_of_superiority\n";
        std::ostringstream line;
        line << s.pairs << ',' << number_text(s.median_difference) << ',' << number_text(s.superiority) << '\n';
        summary << head << line.str();
        out << head << line.str();
        if (!csv || !pairs || !summary) throw ConfigError("cannot write to '" + cfg.output_dir + "'");
        return 0;
    });
}

int cmd_sweep_rbudget(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = command_config(cl);
        auto ec = engine_config(cfg);
        ec.strategy = parse_strategy(cl.strategy);
        const auto values = cl.values.empty() ? default_sweep_values() : parse_rational_list(cl.values);
        Problem problem;
        Valuation truth;
        std::uint64_t seed = cfg.seed;
        if (!cl.scenarios.empty()) {
            const auto list = load_scenarios(cl.scenarios);
            if (list.empty()) throw ConfigError("scenario list is empty");
            auto loaded = load_scenario(list.front());
            problem = std::move(loaded.problem);
            truth = std::move(loaded.truth);
            if (!cl.seed) seed = list.front().seed;
        } else {
            require(cl.model, "--model");
            require(cl.props, "--props");
            if (cfg.truth_file.empty()) throw ConfigError("sweep needs truth_file or --truth");
            problem = Problem{load_model(cl.model), load_requirements(cl.props)};
            truth = load_truth(cfg.truth_file, problem.bundle.model);
        }
        const auto rows = sweep_rbudget(problem, truth, seed, ec, values);
        fs::create_directories(cfg.output_dir);
        std::ofstream csv(fs::path(cfg.output_dir) / "sweep.csv");
        std::ostringstream text;
        text << "rbudget,rounds,total_cost,wall_ms\n";
        for (const auto& r : rows) {
            print_warnings(r.warnings, err);
            text << cost_text(r.rbudget) << ',' << r.rounds << ',' << cost_text(r.total_cost) << ','
                 << std::fixed << std::setprecision(1) << r.wall_ms << std::defaultfloat << '\n';
        }
        csv << text.str();
        out << text.str();
        if (!csv) throw ConfigError("cannot write to '" + cfg.output_dir + "'");
        return 0;
    });
}

int cmd_generate_scenarios(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(cl.model, "--model");
        require(cl.props, "--props");
        SynthesisOptions opts;
        opts.count = cl.count;
        if (cl.seed) opts.seed = *cl.seed;
        auto list = synthesize_scenarios(cl.model, cl.props, opts);
        if (cl.out.empty()) {
            out << scenarios_json(list);
            return 0;
        }
        const auto dir = fs::absolute(fs::path(cl.out)).parent_path();
        for (auto& s : list) {
            s.model = fs::relative(fs::absolute(s.model), dir).string();
            s.props = fs::relative(fs::absolute(s.props), dir).string();
        }
        std::ofstream f(cl.out);
        f << scenarios_json(list);
        if (!f) throw ConfigError("cannot write '" + cl.out + "'");
        return 0;
    });
}

}  // namespace aqv
