#include "aqv/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace aqv {

namespace {

bool upper_kind(Relation rel) { return rel == Relation::Less || rel == Relation::LessEqual; }

double finite_or_surrogate(double v) {
    if (std::isnan(v)) return kSurrogate;
    return std::min(std::abs(v), kSurrogate);
}

}  // namespace

double wrong_end(Relation rel, double lo, double hi) { return upper_kind(rel) ? lo : hi; }
double right_end(Relation rel, double lo, double hi) { return upper_kind(rel) ? hi : lo; }

ZeroObservations::ZeroObservations(std::vector<StateIndex> states)
    : std::runtime_error("no observations for " + std::to_string(states.size()) + " parametric state(s)"),
      states_(std::move(states)) {}

Valuation estimate_params(const ModelBundle& bundle, const ObservationFunction& obs) {
    auto est = frequency_estimate(bundle, obs);
    if (!est.unobserved.empty()) throw ZeroObservations(std::move(est.unobserved));
    return *est.valuation;
}

std::vector<ExprGradient> expression_gradients(const std::vector<PropertyExpression>& exprs) {
    std::vector<ExprGradient> out;
    out.reserve(exprs.size());
    for (const auto& pe : exprs) {
        ExprGradient g;
        for (auto p : pe.expr.parameters()) g.partials.emplace_back(p, partial_derivative(pe.expr, p));
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<Rational> component_costs(const ModelBundle& bundle) {
    std::vector<Rational> costs;
    for (const auto& c : bundle.components) costs.push_back(c.cost);
    return costs;
}

namespace {

std::uint64_t floor_count(const Rational& x) {
    if (x <= 0) return 0;
    const mpz_class q = x.get_num() / x.get_den();
    if (!q.fits_ulong_p()) return 9'000'000'000'000'000'000ULL;
    return q.get_ui();
}

}  // namespace

std::vector<std::uint64_t> nobs_from_relevance(const Rational& rbudget, const std::vector<double>& relevance,
                                               const std::vector<Rational>& costs) {
    std::vector<std::uint64_t> nobs(relevance.size(), 0);
    // doubles convert to mpq exactly, so the floors below are exact
    std::vector<Rational> rel;
    Rational total = 0;
    for (double r : relevance) {
        rel.emplace_back(std::isfinite(r) ? std::max(r, 0.0) : (std::isnan(r) ? 0.0 : kSurrogate));
        total += rel.back();
    }
    if (total <= 0) return nobs;
    for (std::size_t j = 0; j < rel.size(); ++j) nobs[j] = floor_count(rbudget * rel[j] / (total * costs[j]));
    const Rational all = std::accumulate(costs.begin(), costs.end(), Rational(0));
    if (std::all_of(nobs.begin(), nobs.end(), [](auto n) { return n == 0; }) && rbudget >= all) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < rel.size(); ++j) {
            if (rel[j] / costs[j] > rel[best] / costs[best]) best = j;
        }
        nobs[best] = 1;
    }
    return nobs;
}

std::vector<std::uint64_t> uniform_split(const Rational& rbudget, const std::vector<Rational>& costs,
                                         const std::vector<std::size_t>& which) {
    std::vector<std::uint64_t> nobs(costs.size(), 0);
    if (which.empty()) return nobs;
    const Rational share = rbudget / Rational(static_cast<unsigned long>(which.size()));
    for (auto j : which) {
        const Rational q = share / costs[j];
        nobs[j] = mpz_class(q.get_num() / q.get_den()).get_ui();
    }
    return nobs;
}

Allocation allocate(const Rational& rbudget, const ModelBundle& bundle, const HeuristicInput& in,
                    const ObservationFunction& obs, const HeuristicConfig& cfg) {
    const auto costs = component_costs(bundle);
    const std::size_t m = costs.size();
    Allocation out;
    out.relevance.assign(m, 0.0);
    std::vector<std::size_t> every(m);
    std::iota(every.begin(), every.end(), 0);

    // D1
    std::vector<std::size_t> U;
    for (std::size_t i = 0; i < in.requirements.size(); ++i) {
        if (in.decided.count(in.requirements[i].id)) continue;
        const auto& iv = in.intervals[i];
        const double b = in.requirements[i].bound.get_d();
        if (iv.lo <= b && b <= iv.hi) U.push_back(i);
    }

    // D2: only intervals with two finite ends take part; first minimum wins.
    std::vector<std::size_t> R = U;
    double best_ratio = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (auto i : U) {
        const auto& iv = in.intervals[i];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) continue;
        const auto rel = in.requirements[i].rel;
        const double b = in.requirements[i].bound.get_d();
        const double num = std::abs(b - wrong_end(rel, iv.lo, iv.hi));
        const double den = std::abs(b - right_end(rel, iv.lo, iv.hi));
        if (den == 0.0) continue;
        const double ratio = num / den;
        if (ratio < cfg.epsilon1 && ratio < best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    if (std::isfinite(best_ratio)) R = {best};
    for (auto i : R) out.selected.push_back(in.requirements[i].id);

    Valuation estimate;
    try {
        estimate = estimate_params(bundle, obs);
    } catch (const ZeroObservations& e) {
        std::vector<std::size_t> which;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& z = bundle.components[j].z_states;
            const bool hit = std::any_of(z.begin(), z.end(), [&](StateIndex s) {
                return std::find(e.states().begin(), e.states().end(), s) != e.states().end();
            });
            if (hit) which.push_back(j);
        }
        out.nobs = uniform_split(rbudget, costs, which);
        out.uniform = true;
        return out;
    }

    std::vector<std::vector<std::size_t>> params(m);
    for (std::size_t j = 0; j < m; ++j) params[j] = params_of_component(bundle.model, bundle.components[j]);

    for (auto i : R) {
        const auto& iv = in.intervals[i];
        const double b = in.requirements[i].bound.get_d();
        double weight = (iv.hi - iv.lo) / std::max(std::abs(b - 0.5 * (iv.lo + iv.hi)), cfg.epsilon2);
        weight = finite_or_surrogate(weight);
        for (std::size_t j = 0; j < m; ++j) {
            double sensitivity = 0;
            for (const auto& [p, d] : in.gradients[i].partials) {
                if (std::find(params[j].begin(), params[j].end(), p) == params[j].end()) continue;
                try {
                    sensitivity += finite_or_surrogate(eval(d, estimate));
                } catch (const SingularEvaluation&) {
                    sensitivity += kSurrogate;
                }
            }
            out.relevance[j] += weight * sensitivity;
        }
    }

    const double total = std::accumulate(out.relevance.begin(), out.relevance.end(), 0.0);
    if (!(total > 0)) {
        out.nobs = uniform_split(rbudget, costs, every);
        out.uniform = true;
        return out;
    }
    out.nobs = nobs_from_relevance(rbudget, out.relevance, costs);
    return out;
}

}  // namespace aqv
