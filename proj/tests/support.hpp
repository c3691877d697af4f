#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <random>
#include <string>
#include <vector>

#include "aqv/model.hpp"

namespace aqv::oracle {

inline Rational random_fraction(std::mt19937_64& rng, int lo, int hi, int den) {
    std::uniform_int_distribution<int> d(lo, hi);
    Rational r(d(rng), den);
    r.canonicalize();
    return r;
}

/// Random parametric chain with `n` states and `k` parameters. Parametric
/// rows use p, 1-p or p*q, 1-p*q; constant rows split mass over up to three
/// successors. The last two states are absorbing, the last one labelled
/// "goal"; a few other states are labelled "goal" as well.
inline ParametricDtmc random_dtmc(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    ParametricDtmc m;
    for (std::size_t i = 0; i < k; ++i) m.params.push_back("p" + std::to_string(i));
    for (std::size_t s = 0; s < n; ++s) m.states.push_back("s" + std::to_string(s));
    m.transitions.resize(n);
    m.labels.resize(n);
    m.state_rewards.resize(n);
    std::uniform_int_distribution<std::size_t> pick_state(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_param(0, k - 1);
    std::uniform_real_distribution<double> u01(0, 1);

    auto add = [&](std::size_t s, std::size_t t, const RationalFunction& f) {
        for (auto& tr : m.transitions[s]) {
            if (tr.target == t) {
                tr.prob = tr.prob + f;
                return;
            }
        }
        m.transitions[s].push_back({t, f});
    };

    // Mostly one of the next few states, sometimes anywhere.
    auto successor = [&](std::size_t s) {
        if (u01(rng) < 0.3) return pick_state(rng);
        std::uniform_int_distribution<std::size_t> later(std::min(s + 1, n - 1), std::min(s + 4, n - 1));
        return later(rng);
    };
    for (std::size_t s = 0; s < n; ++s) {
        m.state_rewards[s] = random_fraction(rng, 0, 4, 2);
        if (s + 2 >= n && s > 0) {
            add(s, s, RationalFunction(Rational(1)));
            if (s + 1 == n) m.labels[s].insert("goal");
            continue;
        }
        if (s > 0 && u01(rng) < 0.1) m.labels[s].insert("goal");
        if (u01(rng) < 0.5) {
            auto p = RationalFunction::variable(pick_param(rng));
            if (k > 1 && u01(rng) < 0.3) p = p * RationalFunction::variable(pick_param(rng));
            add(s, successor(s), p);
            add(s, successor(s), RationalFunction(Rational(1)) - p);
        } else {
            std::uniform_int_distribution<int> fan(1, 3);
            const int f = fan(rng);
            std::vector<int> w(f);
            for (auto& x : w) x = 1 + static_cast<int>(u01(rng) * 5);
            int total = 0;
            for (auto x : w) total += x;
            for (int i = 0; i < f; ++i) add(s, successor(s), RationalFunction(Rational(w[i], total)));
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& t : m.transitions[s]) {
            if (u01(rng) < 0.1) m.transition_rewards[{s, t.target}] = random_fraction(rng, 1, 3, 1);
        }
    }
    return m;
}

inline StateSet labelled(const ParametricDtmc& m, const std::string& label) {
    StateSet out(m.num_states());
    for (std::size_t s = 0; s < m.num_states(); ++s) out[s] = m.labels[s].count(label) > 0;
    return out;
}

/// Numeric transition matrix at a valuation.
inline Eigen::MatrixXd numeric_matrix(const ParametricDtmc& m, const Valuation& v) {
    const auto n = static_cast<Eigen::Index>(m.num_states());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (const auto& t : m.transitions[s]) {
            P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.target)) += eval(t.prob, v);
        }
    }
    return P;
}

/// States that reach `goal` in the numeric graph (edges > 1e-14).
inline std::vector<bool> can_reach(const Eigen::MatrixXd& P, const std::vector<bool>& goal) {
    const auto n = P.rows();
    std::vector<bool> seen = goal;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index u = 0; u < n; ++u) {
            if (seen[u] || goal[u]) continue;
            for (Eigen::Index w = 0; w < n; ++w) {
                if (P(u, w) > 1e-14 && seen[w]) {
                    seen[u] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    return seen;
}

/// Probability of eventually reaching `goal` from `start`, by a dense solve.
inline double oracle_reach_prob(const ParametricDtmc& m, const Valuation& v, std::size_t start,
                                const std::vector<bool>& goal) {
    const auto P = numeric_matrix(m, v);
    const auto n = P.rows();
    const auto reach = can_reach(P, goal);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index u = 0; u < n; ++u) {
        if (goal[u]) {
            b(u) = 1;
        } else if (reach[u]) {
            A.row(u) -= P.row(u);
        }
    }
    const Eigen::VectorXd x = A.partialPivLu().solve(b);
    return x(static_cast<Eigen::Index>(start));
}

/// Expected cumulative reward until `goal`; nullopt if infinite.
inline std::optional<double> oracle_reach_reward(const ParametricDtmc& m, const Valuation& v, std::size_t start,
                                                 const std::vector<bool>& goal) {
    const auto P = numeric_matrix(m, v);
    const auto n = P.rows();
    if (goal[start]) return 0.0;
    std::vector<bool> reachable(n, false);
    std::deque<Eigen::Index> q{static_cast<Eigen::Index>(start)};
    reachable[start] = true;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        if (goal[u]) continue;
        for (Eigen::Index w = 0; w < n; ++w) {
            if (P(u, w) > 1e-14 && !reachable[w]) {
                reachable[w] = true;
                q.push_back(w);
            }
        }
    }
    const auto reach = can_reach(P, goal);
    for (Eigen::Index u = 0; u < n; ++u) {
        if (reachable[u] && !reach[u]) return std::nullopt;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index u = 0; u < n; ++u) {
        if (goal[u] || !reachable[u]) continue;
        A.row(u) -= P.row(u);
        b(u) = m.state_rewards[u].get_d();
        for (Eigen::Index w = 0; w < n; ++w) b(u) += P(u, w) * m.transition_reward(u, w).get_d();
    }
    const Eigen::VectorXd x = A.partialPivLu().solve(b);
    return x(static_cast<Eigen::Index>(start));
}

/// Random polynomial of total degree <= `degree` in k variables.
inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t k, std::uint32_t degree, int lo, int hi,
                                    std::size_t terms) {
    std::uniform_int_distribution<std::uint32_t> exp(0, degree);
    std::uniform_int_distribution<std::size_t> var(0, k - 1);
    Polynomial p;
    for (std::size_t t = 0; t < terms; ++t) {
        Monomial m(k, 0);
        const auto d = exp(rng);
        for (std::uint32_t i = 0; i < d; ++i) ++m[var(rng)];
        p.add_term(m, random_fraction(rng, lo, hi, 4));
    }
    return p;
}

/// Random rational function in k variables with degree <= 3 whose
/// denominator is at least 1 on the non-negative orthant.
inline RationalFunction random_rational(std::mt19937_64& rng, std::size_t k) {
    auto num = random_polynomial(rng, k, 3, -8, 8, 5);
    auto den = Polynomial(Rational(1)) + random_polynomial(rng, k, 3, 0, 8, 3);
    return RationalFunction(num, den);
}

/// Plain double evaluation straight from the exact coefficients.
inline double direct_eval(const Polynomial& p, std::span<const double> x) {
    double s = 0;
    for (const auto& [m, c] : p.terms()) {
        double t = c.get_d();
        for (std::size_t i = 0; i < m.size(); ++i) t *= std::pow(x[i], static_cast<int>(m[i]));
        s += t;
    }
    return s;
}

inline double direct_eval(const RationalFunction& f, std::span<const double> x) {
    return direct_eval(f.numerator(), x) / direct_eval(f.denominator(), x);
}

struct Range {
    double lo;
    double hi;
};

/// Min and max over a grid of `points` per dimension spanning the box,
/// restricted to points accepted by `keep`.
template <typename Keep>
Range grid_range(const RationalFunction& f, const std::vector<std::pair<double, double>>& box, int points, Keep keep) {
    const std::size_t k = box.size();
    std::vector<double> x(k);
    std::vector<int> idx(k, 0);
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) {
            x[i] = box[i].first + (box[i].second - box[i].first) * idx[i] / (points - 1);
        }
        if (keep(x)) {
            const double v = direct_eval(f, x);
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
        std::size_t i = 0;
        while (i < k && ++idx[i] == points) idx[i++] = 0;
        if (i == k) break;
    }
    return r;
}

inline Range grid_range(const RationalFunction& f, const std::vector<std::pair<double, double>>& box, int points) {
    return grid_range(f, box, points, [](const auto&) { return true; });
}

inline Valuation random_valuation(std::mt19937_64& rng, std::size_t k, double lo = 0.05, double hi = 0.95) {
    std::uniform_real_distribution<double> d(lo, hi);
    Valuation v(k);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace aqv::oracle
