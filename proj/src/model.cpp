#include "aqv/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

namespace aqv {

std::optional<StateIndex> ParametricDtmc::find_state(std::string_view name) const {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) return std::nullopt;
    return static_cast<StateIndex>(it - states.begin());
}

std::optional<std::size_t> ParametricDtmc::find_param(std::string_view name) const {
    auto it = std::find(params.begin(), params.end(), name);
    if (it == params.end()) return std::nullopt;
    return static_cast<std::size_t>(it - params.begin());
}

RationalFunction ParametricDtmc::probability(StateIndex u, StateIndex v) const {
    RationalFunction sum;
    for (const auto& t : transitions[u]) {
        if (t.target == v) sum = sum + t.prob;
    }
    return sum;
}

bool ParametricDtmc::is_parametric(StateIndex s) const {
    return std::any_of(transitions[s].begin(), transitions[s].end(),
                       [](const Transition& t) { return !t.prob.is_constant(); });
}

Rational ParametricDtmc::transition_reward(StateIndex u, StateIndex v) const {
    auto it = transition_rewards.find({u, v});
    return it == transition_rewards.end() ? Rational(0) : it->second;
}

std::uint64_t ObservationFunction::count(StateIndex z, StateIndex s) const {
    auto it = counts_.find({z, s});
    return it == counts_.end() ? 0 : it->second;
}

std::uint64_t ObservationFunction::total_from(StateIndex z) const {
    std::uint64_t total = 0;
    for (auto it = counts_.lower_bound({z, 0}); it != counts_.end() && it->first.first == z; ++it) total += it->second;
    return total;
}

void ObservationFunction::add(StateIndex z, StateIndex s, std::uint64_t n) {
    if (n == 0) return;
    counts_[{z, s}] += n;
}

ObservationFunction merge_observations(const ObservationFunction& a, const ObservationFunction& b) {
    ObservationFunction r = a;
    for (const auto& [key, n] : b.counts()) r.add(key.first, key.second, n);
    return r;
}

const ParametricStateShape* ModelBundle::shape_of(StateIndex s) const {
    auto it = std::find_if(shapes.begin(), shapes.end(), [s](const auto& sh) { return sh.state == s; });
    return it == shapes.end() ? nullptr : &*it;
}

std::vector<StateIndex> ModelBundle::parametric_states() const {
    std::vector<StateIndex> out;
    for (const auto& sh : shapes) out.push_back(sh.state);
    return out;
}

void validate_dtmc(const ParametricDtmc& m, const std::optional<Valuation>& estimate) {
    const auto n = m.num_states();
    if (n == 0) throw ModelError("model has no states");
    if (m.init >= n) throw ModelError("initial state out of range");
    if (m.transitions.size() != n || m.labels.size() != n || m.state_rewards.size() != n) {
        throw ModelError("per-state tables do not match the number of states");
    }
    for (StateIndex s = 0; s < n; ++s) {
        if (m.transitions[s].empty()) throw ModelError("state '" + m.states[s] + "' has no outgoing transition");
        std::set<StateIndex> seen;
        for (const auto& t : m.transitions[s]) {
            if (t.target >= n) throw ModelError("transition target out of range from '" + m.states[s] + "'");
            if (!seen.insert(t.target).second) {
                throw ModelError("duplicate transition " + m.states[s] + " -> " + m.states[t.target]);
            }
            if (t.prob.variable_span() > m.params.size()) {
                throw ModelError("transition from '" + m.states[s] + "' uses an undeclared parameter");
            }
            if (t.prob.is_constant()) {
                const Rational c = t.prob.constant_value();
                if (c < 0 || c > 1) {
                    throw ModelError("constant probability outside [0,1] on " + m.states[s] + " -> " +
                                     m.states[t.target]);
                }
            }
        }
        if (m.state_rewards[s] < 0) throw ModelError("negative reward on state '" + m.states[s] + "'");
    }
    for (const auto& [key, r] : m.transition_rewards) {
        if (key.first >= n || key.second >= n) throw ModelError("transition reward on unknown states");
        if (r < 0) throw ModelError("negative transition reward");
    }

    std::vector<Valuation> points;
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unit(1e-3, 1.0 - 1e-3);
    const std::size_t samples = m.params.empty() ? 1 : 200;
    for (std::size_t i = 0; i < samples; ++i) {
        Valuation v(m.params.size());
        for (auto& x : v) x = unit(rng);
        points.push_back(std::move(v));
    }
    if (estimate) points.push_back(*estimate);
    for (StateIndex s = 0; s < n; ++s) {
        RationalFunction sum;
        for (const auto& t : m.transitions[s]) sum = sum + t.prob;
        if (sum.is_constant()) {
            if (sum.constant_value() != 1) {
                throw ModelError("outgoing probabilities of '" + m.states[s] + "' sum to " +
                                 sum.constant_value().get_str() + ", not 1");
            }
            continue;
        }
        for (const auto& v : points) {
            double value = 0.0;
            try {
                value = eval(sum, v);
            } catch (const SingularEvaluation&) {
                continue;
            }
            if (std::abs(value - 1.0) > 1e-9) {
                throw ModelError("outgoing probabilities of '" + m.states[s] + "' do not sum to 1");
            }
        }
    }
}

std::vector<ParametricStateShape> analyze_parametric_states(const ParametricDtmc& m) {
    std::vector<ParametricStateShape> shapes;
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        if (!m.is_parametric(s)) continue;
        ParametricStateShape shape;
        shape.state = s;
        std::vector<std::size_t> complex_edges;
        const auto& edges = m.transitions[s];
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& f = edges[e].prob;
            if (f.is_constant()) {
                shape.constant_edges.push_back(e);
                shape.constant_mass += f.constant_value();
                continue;
            }
            const auto params = f.parameters();
            if (params.size() == 1 && f == RationalFunction::variable(params.front())) {
                const auto p = params.front();
                if (std::any_of(shape.bare.begin(), shape.bare.end(), [p](const auto& b) { return b.param == p; })) {
                    throw ModelError("parameter '" + m.params[p] + "' labels two edges out of state '" +
                                     m.states[s] + "'");
                }
                shape.bare.push_back({e, p});
                continue;
            }
            complex_edges.push_back(e);
        }
        if (complex_edges.size() > 1) {
            throw ModelError("state '" + m.states[s] +
                             "' has more than one non-bare parametric edge; only p, constants and one "
                             "complement edge 1 - (sum of the others) are supported");
        }
        if (complex_edges.size() == 1) {
            const auto e = complex_edges.front();
            Polynomial expected(Rational(1) - shape.constant_mass);
            for (const auto& b : shape.bare) expected -= Polynomial::variable(b.param);
            if (!(edges[e].prob == RationalFunction(expected))) {
                throw ModelError("unsupported parametric edge " + m.states[s] + " -> " + m.states[edges[e].target] +
                                 ": expected a bare parameter, a constant or 1 - (sum of the state's other edges)");
            }
            shape.derived_edge = e;
        }
        shapes.push_back(std::move(shape));
    }
    return shapes;
}

std::vector<std::size_t> params_of_component(const ParametricDtmc& m, const Component& c) {
    std::set<std::size_t> out;
    for (auto z : c.z_states) {
        for (const auto& t : m.transitions[z]) {
            for (auto p : t.prob.parameters()) out.insert(p);
        }
    }
    return {out.begin(), out.end()};
}

FrequencyEstimate frequency_estimate(const ModelBundle& bundle, const ObservationFunction& obs) {
    FrequencyEstimate result;
    const auto& m = bundle.model;
    std::vector<double> hits(m.params.size(), 0.0);
    std::vector<double> totals(m.params.size(), 0.0);
    for (const auto& shape : bundle.shapes) {
        const auto total = obs.total_from(shape.state);
        if (total == 0) {
            result.unobserved.push_back(shape.state);
            continue;
        }
        for (const auto& b : shape.bare) {
            hits[b.param] += static_cast<double>(obs.count(shape.state, m.transitions[shape.state][b.edge].target));
            totals[b.param] += static_cast<double>(total);
        }
    }
    if (!result.unobserved.empty()) return result;
    Valuation v(m.params.size(), 0.0);
    for (std::size_t p = 0; p < v.size(); ++p) {
        if (totals[p] > 0) v[p] = hits[p] / totals[p];
    }
    result.valuation = std::move(v);
    return result;
}

ModelBundle make_bundle(ParametricDtmc model, std::vector<Component> components, ObservationFunction initial_obs) {
    ModelBundle b;
    b.model = std::move(model);
    b.components = std::move(components);
    b.initial_obs = std::move(initial_obs);
    const auto& m = b.model;
    validate_dtmc(m);
    b.shapes = analyze_parametric_states(m);

    b.component_of_state.assign(m.num_states(), std::nullopt);
    std::set<std::string> names;
    for (std::size_t j = 0; j < b.components.size(); ++j) {
        const auto& c = b.components[j];
        if (!names.insert(c.name).second) throw ModelError("duplicate component '" + c.name + "'");
        if (c.cost <= 0) throw ModelError("component '" + c.name + "' must have a positive cost");
        if (c.z_states.empty()) throw ModelError("component '" + c.name + "' has no states");
        for (auto z : c.z_states) {
            if (z >= m.num_states()) throw ModelError("component '" + c.name + "' names an unknown state");
            if (b.component_of_state[z]) {
                throw ModelError("state '" + m.states[z] + "' belongs to components '" +
                                 b.components[*b.component_of_state[z]].name + "' and '" + c.name + "'");
            }
            if (!m.is_parametric(z)) {
                throw ModelError("component '" + c.name + "' lists state '" + m.states[z] +
                                 "' which has no parametric outgoing transition");
            }
            b.component_of_state[z] = j;
        }
    }
    for (const auto& sh : b.shapes) {
        if (!b.component_of_state[sh.state]) {
            throw ModelError("parametric state '" + m.states[sh.state] + "' is not assigned to any component");
        }
    }
    std::vector<std::optional<std::size_t>> owner(m.params.size());
    for (std::size_t j = 0; j < b.components.size(); ++j) {
        for (auto p : params_of_component(m, b.components[j])) {
            if (owner[p] && *owner[p] != j) {
                throw ModelError("parameter '" + m.params[p] + "' is shared by components '" +
                                 b.components[*owner[p]].name + "' and '" + b.components[j].name + "'");
            }
            owner[p] = j;
        }
    }
    for (const auto& [key, n] : b.initial_obs.counts()) {
        const auto [z, s] = key;
        if (z >= m.num_states() || s >= m.num_states()) throw ModelError("observation on unknown state");
        if (!b.component_of_state[z]) {
            throw ModelError("observation from '" + m.states[z] + "', which is not a parametric state");
        }
        const auto& out = m.transitions[z];
        if (std::none_of(out.begin(), out.end(), [s = s](const Transition& t) { return t.target == s; })) {
            throw ModelError("observation of non-existent transition " + m.states[z] + " -> " + m.states[s]);
        }
    }
    if (const auto est = frequency_estimate(b, b.initial_obs); est.valuation) validate_dtmc(m, est.valuation);
    return b;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

Rational parse_number(const std::string& text, std::size_t line) {
    RationalFunction f;
    try {
        f = parse_expr(text, {});
    } catch (const std::exception& e) {
        throw ModelError("malformed number '" + text + "': " + e.what(), line);
    }
    return f.constant_value();
}

}  // namespace

ModelBundle parse_model(std::string_view text) {
    static const std::regex re_dtmc(R"(^dtmc$)");
    static const std::regex re_param(R"(^param\s+([A-Za-z_]\w*)$)");
    static const std::regex re_state(R"(^state\s+([A-Za-z_]\w*)(\s+init)?$)");
    static const std::regex re_label(R"(^label\s+(\w+)\s+\"([^\"]*)\"$)");
    static const std::regex re_trans(R"(^trans\s+(\w+)\s*->\s*(\w+)\s*:\s*(.+)$)");
    static const std::regex re_trew(R"(^reward\s+(\w+)\s*->\s*(\w+)\s*:\s*(.+)$)");
    static const std::regex re_srew(R"(^reward\s+(\w+)\s*:\s*(.+)$)");
    static const std::regex re_comp(R"(^component\s+(\w+)\s+cost\s+(\S+)\s+states\s*\{([^}]*)\}$)");
    static const std::regex re_obs(R"(^observe\s+(\w+)\s*->\s*(\w+)\s*:\s*(\d+)$)");

    struct Statement {
        std::string body;
        std::size_t line;
    };
    std::vector<Statement> statements;
    {
        std::istringstream in{std::string(text)};
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            auto line = trim(strip_comment(raw));
            if (line.empty()) continue;
            if (line == "dtmc") {
                statements.push_back({line, line_no});
                continue;
            }
            if (line.back() != ';') throw ModelError("statement must end with ';'", line_no);
            line = trim(std::string_view(line).substr(0, line.size() - 1));
            if (line == "dtmc") {
                statements.push_back({line, line_no});
                continue;
            }
            statements.push_back({line, line_no});
        }
    }
    if (statements.empty() || statements.front().body != "dtmc") {
        throw ModelError("model must start with 'dtmc'", statements.empty() ? 1 : statements.front().line);
    }

    ParametricDtmc m;
    std::optional<StateIndex> init;
    std::smatch mt;
    // Declarations first so that statements may reference later declarations.
    for (const auto& st : statements) {
        if (std::regex_match(st.body, mt, re_param)) {
            if (m.find_param(mt[1].str())) throw ModelError("duplicate parameter '" + mt[1].str() + "'", st.line);
            m.params.push_back(mt[1].str());
        } else if (std::regex_match(st.body, mt, re_state)) {
            if (m.find_state(mt[1].str())) throw ModelError("duplicate state '" + mt[1].str() + "'", st.line);
            m.states.push_back(mt[1].str());
            if (mt[2].matched) {
                if (init) throw ModelError("more than one initial state", st.line);
                init = m.states.size() - 1;
            }
        }
    }
    if (!init) throw ModelError("no state is marked init");
    m.init = *init;
    const auto n = m.num_states();
    m.transitions.assign(n, {});
    m.labels.assign(n, {});
    m.state_rewards.assign(n, Rational(0));

    auto state_of = [&m](const std::string& name, std::size_t line) {
        auto s = m.find_state(name);
        if (!s) throw ModelError("unknown state '" + name + "'", line);
        return *s;
    };

    std::vector<Component> components;
    ObservationFunction obs;
    for (const auto& st : statements) {
        const auto& body = st.body;
        if (body == "dtmc") {
            if (&st != &statements.front()) throw ModelError("repeated 'dtmc' header", st.line);
        } else if (std::regex_match(body, mt, re_param) || std::regex_match(body, mt, re_state)) {
            continue;
        } else if (std::regex_match(body, mt, re_label)) {
            m.labels[state_of(mt[1].str(), st.line)].insert(mt[2].str());
        } else if (std::regex_match(body, mt, re_trans)) {
            const auto u = state_of(mt[1].str(), st.line);
            const auto v = state_of(mt[2].str(), st.line);
            RationalFunction f;
            try {
                f = parse_expr(mt[3].str(), m.params);
            } catch (const ExprSyntaxError& e) {
                throw ModelError(std::string("in transition expression: ") + e.what(), st.line);
            }
            for (const auto& t : m.transitions[u]) {
                if (t.target == v) throw ModelError("duplicate transition " + mt[1].str() + " -> " + mt[2].str(), st.line);
            }
            m.transitions[u].push_back({v, std::move(f)});
        } else if (std::regex_match(body, mt, re_trew)) {
            const auto u = state_of(mt[1].str(), st.line);
            const auto v = state_of(mt[2].str(), st.line);
            const auto r = parse_number(mt[3].str(), st.line);
            if (r < 0) throw ModelError("rewards must be non-negative", st.line);
            m.transition_rewards[{u, v}] += r;
        } else if (std::regex_match(body, mt, re_srew)) {
            const auto s = state_of(mt[1].str(), st.line);
            const auto r = parse_number(mt[2].str(), st.line);
            if (r < 0) throw ModelError("rewards must be non-negative", st.line);
            m.state_rewards[s] += r;
        } else if (std::regex_match(body, mt, re_comp)) {
            Component c;
            c.name = mt[1].str();
            c.cost = parse_number(mt[2].str(), st.line);
            std::stringstream list(mt[3].str());
            std::string item;
            while (std::getline(list, item, ',')) {
                auto name = trim(item);
                if (name.empty()) throw ModelError("empty state in component '" + c.name + "'", st.line);
                c.z_states.push_back(state_of(name, st.line));
            }
            for (const auto& other : components) {
                if (other.name == c.name) throw ModelError("duplicate component '" + c.name + "'", st.line);
            }
            components.push_back(std::move(c));
        } else if (std::regex_match(body, mt, re_obs)) {
            const auto z = state_of(mt[1].str(), st.line);
            const auto s = state_of(mt[2].str(), st.line);
            obs.add(z, s, std::stoull(mt[3].str()));
        } else {
            throw ModelError("unrecognised statement '" + body + "'", st.line);
        }
    }
    return make_bundle(std::move(m), std::move(components), std::move(obs));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelBundle load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string print_model(const ModelBundle& bundle) {
    const auto& m = bundle.model;
    std::ostringstream os;
    os << "dtmc\n";
    for (const auto& p : m.params) os << "param " << p << ";\n";
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        os << "state " << m.states[s] << (s == m.init ? " init" : "") << ";\n";
    }
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        for (const auto& a : m.labels[s]) os << "label " << m.states[s] << " \"" << a << "\";\n";
    }
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        for (const auto& t : m.transitions[s]) {
            os << "trans " << m.states[s] << " -> " << m.states[t.target] << " : " << to_string(t.prob, m.params)
               << ";\n";
        }
    }
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        if (m.state_rewards[s] != 0) os << "reward " << m.states[s] << " : " << m.state_rewards[s].get_str() << ";\n";
    }
    for (const auto& [key, r] : m.transition_rewards) {
        os << "reward " << m.states[key.first] << " -> " << m.states[key.second] << " : " << r.get_str() << ";\n";
    }
    for (const auto& c : bundle.components) {
        os << "component " << c.name << " cost " << c.cost.get_str() << " states { ";
        for (std::size_t i = 0; i < c.z_states.size(); ++i) os << (i ? ", " : "") << m.states[c.z_states[i]];
        os << " };\n";
    }
    for (const auto& [key, n] : bundle.initial_obs.counts()) {
        os << "observe " << m.states[key.first] << " -> " << m.states[key.second] << " : " << n << ";\n";
    }
    return os.str();
}

}  // namespace aqv
