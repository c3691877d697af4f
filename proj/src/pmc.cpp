#include "aqv/pmc.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace aqv {

namespace {

std::vector<std::vector<StateIndex>> predecessors(const ParametricDtmc& m) {
    std::vector<std::vector<StateIndex>> pred(m.num_states());
    for (StateIndex u = 0; u < m.num_states(); ++u) {
        for (const auto& t : m.transitions[u]) {
            if (!t.prob.is_zero()) pred[t.target].push_back(u);
        }
    }
    return pred;
}

/// States in `through` that reach `goal` along non-zero edges whose
/// intermediate states all lie in `through`. Goal states are included.
StateSet backward_reach(const ParametricDtmc& m, const StateSet& goal, const StateSet& through) {
    const auto pred = predecessors(m);
    StateSet seen = goal;
    std::deque<StateIndex> queue;
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        if (goal[s]) queue.push_back(s);
    }
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto u : pred[v]) {
            if (!seen[u] && through[u]) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    return seen;
}

/// States reachable from start without leaving `through` (start included).
StateSet forward_reach(const ParametricDtmc& m, StateIndex start, const StateSet& through) {
    StateSet seen(m.num_states(), false);
    seen[start] = true;
    std::deque<StateIndex> queue{start};
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (const auto& t : m.transitions[u]) {
            if (t.prob.is_zero() || seen[t.target] || !through[t.target]) continue;
            seen[t.target] = true;
            queue.push_back(t.target);
        }
    }
    return seen;
}

/// Numerator over a product of powers of polynomials from a shared factor
/// base. Sums take the exponent-wise maximum as common denominator, and
/// factors are cancelled by trial division, so no polynomial GCD is needed.
struct Factored {
    Polynomial num;
    std::map<std::size_t, std::uint32_t> den;
    bool is_zero() const { return num.is_zero(); }
};

class FactorBase {
   public:
    Factored from(const RationalFunction& f) {
        Factored r{f.numerator(), {}};
        if (!f.denominator().is_constant()) r.num *= 1 / absorb(f.denominator(), r.den);
        else r.num *= 1 / f.denominator().constant_term();
        reduce(r);
        return r;
    }

    RationalFunction to_rational(const Factored& f) const {
        Polynomial den(Rational(1));
        for (const auto& [i, e] : f.den) {
            for (std::uint32_t k = 0; k < e; ++k) den = den * factors_[i];
        }
        return RationalFunction(f.num, den);
    }

    Factored add(const Factored& a, const Factored& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        Factored r;
        r.den = a.den;
        for (const auto& [i, e] : b.den) r.den[i] = std::max(r.den[i], e);
        r.num = scaled_to(a, r.den) + scaled_to(b, r.den);
        reduce(r);
        return r;
    }

    Factored mul(const Factored& a, const Factored& b) {
        if (a.is_zero() || b.is_zero()) return {};
        Factored r{a.num * b.num, a.den};
        for (const auto& [i, e] : b.den) r.den[i] += e;
        reduce(r);
        return r;
    }

    /// a / b for b not identically zero.
    Factored div(const Factored& a, const Factored& b) {
        if (a.is_zero()) return {};
        Factored r{a.num, a.den};
        for (const auto& [i, e] : b.den) r.num = r.num * power(i, e);
        if (b.num.is_constant()) {
            r.num *= 1 / b.num.constant_term();
        } else {
            r.num *= 1 / absorb(b.num, r.den);
        }
        reduce(r);
        return r;
    }

    Factored one_minus(const Factored& a) {
        Factored one{Polynomial(Rational(1)), {}};
        Factored neg{-a.num, a.den};
        return add(one, neg);
    }

   private:
    /// Splits p over the known factors, registers what is left as a new
    /// factor and returns the leftover constant.
    Rational absorb(Polynomial p, std::map<std::size_t, std::uint32_t>& exps) {
        for (std::size_t i = 0; i < factors_.size() && !p.is_constant(); ++i) {
            while (!p.is_constant()) {
                auto q = divide_exact(p, factors_[i]);
                if (!q) break;
                p = std::move(*q);
                ++exps[i];
            }
        }
        if (p.is_constant()) return p.constant_term();
        const Rational lead = p.leading_coefficient();
        p *= 1 / lead;
        factors_.push_back(std::move(p));
        ++exps[factors_.size() - 1];
        return lead;
    }

    Polynomial power(std::size_t i, std::uint32_t e) const {
        Polynomial r(Rational(1));
        for (std::uint32_t k = 0; k < e; ++k) r = r * factors_[i];
        return r;
    }

    Polynomial scaled_to(const Factored& a, const std::map<std::size_t, std::uint32_t>& den) const {
        Polynomial r = a.num;
        for (const auto& [i, e] : den) {
            auto it = a.den.find(i);
            const std::uint32_t have = it == a.den.end() ? 0 : it->second;
            if (e > have) r = r * power(i, e - have);
        }
        return r;
    }

    void reduce(Factored& f) const {
        if (f.num.is_zero()) {
            f.den.clear();
            return;
        }
        for (auto it = f.den.begin(); it != f.den.end();) {
            while (it->second > 0) {
                auto q = divide_exact(f.num, factors_[it->first]);
                if (!q) break;
                f.num = std::move(*q);
                --it->second;
            }
            it = it->second == 0 ? f.den.erase(it) : std::next(it);
        }
    }

    std::vector<Polynomial> factors_;
};

/// x_u = constant_u + sum_v coeff(u,v) x_v over a set of transient states.
class EliminationSystem {
   public:
    explicit EliminationSystem(std::size_t n) : out_(n), in_(n), constant_(n), alive_(n, true) {}

    void add_edge(std::size_t u, std::size_t v, const RationalFunction& w) {
        if (!w.is_zero()) accumulate_edge(u, v, base_.from(w));
    }

    void add_constant(std::size_t u, const RationalFunction& c) {
        constant_[u] = base_.add(constant_[u], base_.from(c));
    }

    RationalFunction solve(std::size_t start, EliminationOrder order) {
        const auto n = out_.size();
        for (std::size_t step = 0; step + 1 < n; ++step) {
            const auto s = pick(start, order);
            eliminate(s);
        }
        auto self = out_[start].find(start);
        if (self == out_[start].end()) return base_.to_rational(constant_[start]);
        return base_.to_rational(base_.div(constant_[start], base_.one_minus(self->second)));
    }

   private:
    void accumulate_edge(std::size_t u, std::size_t v, const Factored& w) {
        if (w.is_zero()) return;
        auto& slot = out_[u][v];
        slot = base_.add(slot, w);
        if (slot.is_zero()) {
            out_[u].erase(v);
            in_[v].erase(u);
        } else {
            in_[v].insert(u);
        }
    }

    std::size_t pick(std::size_t start, EliminationOrder order) const {
        const auto n = out_.size();
        if (order == EliminationOrder::ReverseIndex) {
            for (std::size_t s = n; s-- > 0;) {
                if (alive_[s] && s != start) return s;
            }
        }
        std::size_t best = n;
        std::size_t best_score = std::numeric_limits<std::size_t>::max();
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive_[s] || s == start) continue;
            const auto self = out_[s].count(s);
            const std::size_t score = (in_[s].size() - self) * (out_[s].size() - self);
            if (score < best_score) {
                best_score = score;
                best = s;
            }
        }
        return best;
    }

    void eliminate(std::size_t s) {
        auto& row = out_[s];
        if (auto self = row.find(s); self != row.end()) {
            const Factored stay = base_.one_minus(self->second);
            row.erase(self);
            in_[s].erase(s);
            for (auto& [v, w] : row) w = base_.div(w, stay);
            constant_[s] = base_.div(constant_[s], stay);
        }
        const std::vector<std::size_t> preds(in_[s].begin(), in_[s].end());
        for (auto u : preds) {
            const Factored a = out_[u][s];
            out_[u].erase(s);
            for (const auto& [v, w] : row) accumulate_edge(u, v, base_.mul(a, w));
            if (!constant_[s].is_zero()) constant_[u] = base_.add(constant_[u], base_.mul(a, constant_[s]));
        }
        for (const auto& [v, w] : row) in_[v].erase(s);
        row.clear();
        in_[s].clear();
        alive_[s] = false;
    }

    FactorBase base_;
    std::vector<std::map<std::size_t, Factored>> out_;
    std::vector<std::set<std::size_t>> in_;
    std::vector<Factored> constant_;
    std::vector<bool> alive_;
};

void check_start(const ParametricDtmc& m, StateIndex start) {
    if (start >= m.num_states()) throw PmcError("start state out of range");
}

/// Tarjan SCCs of the subgraph induced by `within`; returns a bottom SCC
/// (no edge leaving it) if one exists.
std::vector<StateIndex> bottom_scc(const ParametricDtmc& m, const StateSet& within) {
    const auto n = m.num_states();
    std::vector<int> index(n, -1);
    std::vector<int> low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<StateIndex> stack;
    std::vector<std::vector<StateIndex>> sccs;
    int counter = 0;
    std::function<void(StateIndex)> strong = [&](StateIndex v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (const auto& t : m.transitions[v]) {
            const auto w = t.target;
            if (t.prob.is_zero() || !within[w]) continue;
            if (index[w] < 0) {
                strong(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<StateIndex> scc;
            StateIndex w = 0;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                scc.push_back(w);
            } while (w != v);
            sccs.push_back(std::move(scc));
        }
    };
    for (StateIndex s = 0; s < n; ++s) {
        if (within[s] && index[s] < 0) strong(s);
    }
    for (auto& scc : sccs) {
        StateSet members(n, false);
        for (auto s : scc) members[s] = true;
        bool bottom = true;
        for (auto s : scc) {
            for (const auto& t : m.transitions[s]) {
                if (!t.prob.is_zero() && !members[t.target]) bottom = false;
            }
        }
        if (bottom) {
            std::sort(scc.begin(), scc.end());
            return scc;
        }
    }
    return {};
}

}  // namespace

RationalFunction reach_prob_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi1, const StateSet& phi2,
                                 const PmcOptions& opts) {
    check_start(m, start);
    const auto n = m.num_states();
    if (phi2[start]) return RationalFunction(Rational(1));
    if (!phi1[start]) return {};

    StateSet through(n, false);
    for (StateIndex s = 0; s < n; ++s) through[s] = phi1[s] && !phi2[s];
    const auto can_reach = backward_reach(m, phi2, through);
    if (!can_reach[start]) return {};

    StateSet maybe(n, false);
    for (StateIndex s = 0; s < n; ++s) maybe[s] = through[s] && can_reach[s];
    const auto live = forward_reach(m, start, maybe);

    std::vector<std::size_t> local(n, n);
    std::vector<StateIndex> states;
    for (StateIndex s = 0; s < n; ++s) {
        if (live[s]) {
            local[s] = states.size();
            states.push_back(s);
        }
    }
    EliminationSystem sys(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (const auto& t : m.transitions[states[i]]) {
            if (phi2[t.target]) {
                sys.add_constant(i, t.prob);
            } else if (local[t.target] < n) {
                sys.add_edge(i, local[t.target], t.prob);
            }
        }
    }
    return sys.solve(local[start], opts.order);
}

RationalFunction reach_reward_expr(const ParametricDtmc& m, StateIndex start, const StateSet& target,
                                   const PmcOptions& opts) {
    check_start(m, start);
    const auto n = m.num_states();
    if (target[start]) return {};

    StateSet not_target(n, false);
    for (StateIndex s = 0; s < n; ++s) not_target[s] = !target[s];
    const auto reachable = forward_reach(m, start, not_target);
    const auto can_reach = backward_reach(m, target, not_target);
    StateSet stuck(n, false);
    bool any_stuck = false;
    for (StateIndex s = 0; s < n; ++s) {
        stuck[s] = reachable[s] && !can_reach[s];
        any_stuck = any_stuck || stuck[s];
    }
    if (any_stuck) {
        auto witness = bottom_scc(m, stuck);
        std::string names;
        for (auto s : witness) names += (names.empty() ? "" : ", ") + m.states[s];
        throw InfiniteReward("expected reward is infinite: bottom SCC {" + names + "} is reachable from '" +
                                 m.states[start] + "' and never reaches the target",
                             std::move(witness));
    }

    std::vector<std::size_t> local(n, n);
    std::vector<StateIndex> states;
    for (StateIndex s = 0; s < n; ++s) {
        if (reachable[s]) {
            local[s] = states.size();
            states.push_back(s);
        }
    }
    EliminationSystem sys(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto u = states[i];
        RationalFunction gain(m.state_rewards[u]);
        for (const auto& t : m.transitions[u]) {
            const auto iota = m.transition_reward(u, t.target);
            if (iota != 0) gain = gain + t.prob * RationalFunction(iota);
            if (local[t.target] < n) sys.add_edge(i, local[t.target], t.prob);
        }
        sys.add_constant(i, gain);
    }
    return sys.solve(local[start], opts.order);
}

RationalFunction bounded_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi1, const StateSet& phi2,
                              std::uint32_t k, const PmcOptions& opts) {
    check_start(m, start);
    if (k > opts.max_bounded_k) {
        throw BoundLimitExceeded("step bound " + std::to_string(k) + " exceeds max_bounded_k = " +
                                 std::to_string(opts.max_bounded_k) + "; raise max_bounded_k in the configuration");
    }
    const auto n = m.num_states();
    std::vector<RationalFunction> x(n);
    for (StateIndex s = 0; s < n; ++s) {
        if (phi2[s]) x[s] = RationalFunction(Rational(1));
    }
    for (std::uint32_t i = 0; i < k; ++i) {
        std::vector<RationalFunction> next(n);
        for (StateIndex s = 0; s < n; ++s) {
            if (phi2[s]) {
                next[s] = RationalFunction(Rational(1));
            } else if (phi1[s]) {
                for (const auto& t : m.transitions[s]) {
                    if (!x[t.target].is_zero()) next[s] = next[s] + t.prob * x[t.target];
                }
            }
        }
        x = std::move(next);
    }
    return x[start];
}

RationalFunction next_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi) {
    check_start(m, start);
    RationalFunction sum;
    for (const auto& t : m.transitions[start]) {
        if (phi[t.target]) sum = sum + t.prob;
    }
    return sum;
}

PropertyExpression property_expression(const ParametricDtmc& m, const Requirement& r, const PmcOptions& opts) {
    PropertyExpression pe;
    pe.requirement_id = r.id;
    pe.kind = r.kind;
    pe.start = start_state(m, r);
    if (r.kind == Requirement::Kind::Reward) {
        pe.expr = reach_reward_expr(m, pe.start, sat_states(m, r.target), opts);
        return pe;
    }
    const auto& p = r.path;
    const auto rhs = sat_states(m, p.rhs);
    switch (p.kind) {
        case PathFormula::Kind::Next:
            pe.expr = next_expr(m, pe.start, rhs);
            break;
        case PathFormula::Kind::Until:
            pe.expr = reach_prob_expr(m, pe.start, sat_states(m, p.lhs), rhs, opts);
            break;
        case PathFormula::Kind::BoundedUntil:
            pe.expr = bounded_expr(m, pe.start, sat_states(m, p.lhs), rhs, p.bound, opts);
            break;
    }
    return pe;
}

std::vector<PropertyExpression> build_property_expressions(const ParametricDtmc& m,
                                                           const std::vector<Requirement>& reqs,
                                                           const PmcOptions& opts) {
    std::vector<PropertyExpression> out;
    out.reserve(reqs.size());
    for (const auto& r : reqs) out.push_back(property_expression(m, r, opts));
    return out;
}

}  // namespace aqv
