#include "aqv/heuristic.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "aqv/confidence.hpp"
#include "aqv/pmc.hpp"
#include "aqv/props.hpp"

namespace aqv {
namespace {

const std::string kModels = AQV_MODELS_DIR;

struct Tas {
    ModelBundle bundle = load_model(kModels + "/tas.pm");
    std::vector<Requirement> reqs = load_requirements(kModels + "/tas.props");
    std::vector<PropertyExpression> exprs = build_property_expressions(bundle.model, reqs);
    std::vector<ExprGradient> grads = expression_gradients(exprs);

    StateIndex st(const char* name) const { return *bundle.model.find_state(name); }

    // every parametric state observed, roughly at the reference truth
    ObservationFunction observed(std::uint64_t scale = 100) const {
        ObservationFunction o;
        o.add(st("s2"), st("s4"), 99 * scale);
        o.add(st("s2"), st("s3"), 1 * scale);
        o.add(st("s5"), st("s9"), 95 * scale);
        o.add(st("s5"), st("s7"), 5 * scale);
        o.add(st("s6"), st("s9"), 94 * scale);
        o.add(st("s6"), st("s8"), 6 * scale);
        return o;
    }
};

std::vector<PropertyInterval> intervals(std::initializer_list<std::pair<double, double>> v) {
    std::vector<PropertyInterval> out;
    for (auto [lo, hi] : v) {
        PropertyInterval pi;
        pi.lo = lo;
        pi.hi = hi;
        out.push_back(pi);
    }
    return out;
}

Rational spend(const std::vector<std::uint64_t>& nobs, const std::vector<Rational>& costs) {
    Rational s = 0;
    for (std::size_t j = 0; j < nobs.size(); ++j) s += Rational(static_cast<unsigned long>(nobs[j])) * costs[j];
    return s;
}

TEST(Heuristic, Ends) {
    EXPECT_EQ(wrong_end(Relation::Less, 0.1, 0.3), 0.1);
    EXPECT_EQ(right_end(Relation::Less, 0.1, 0.3), 0.3);
    EXPECT_EQ(wrong_end(Relation::LessEqual, 0.1, 0.3), 0.1);
    EXPECT_EQ(wrong_end(Relation::Greater, 0.1, 0.3), 0.3);
    EXPECT_EQ(right_end(Relation::Greater, 0.1, 0.3), 0.1);
    EXPECT_EQ(right_end(Relation::GreaterEqual, 0.1, 0.3), 0.1);
    EXPECT_EQ(wrong_end(Relation::Less, 0.2, 0.2), 0.2);
    EXPECT_EQ(right_end(Relation::Less, 0.2, 0.2), 0.2);
}

TEST(Heuristic, NobsArithmetic) {
    const std::vector<Rational> costs{1, 1, 2};
    EXPECT_EQ(nobs_from_relevance(100, {2, 1, 1}, costs), (std::vector<std::uint64_t>{50, 25, 12}));
    EXPECT_EQ(nobs_from_relevance(100, {0, 0, 0}, costs), (std::vector<std::uint64_t>{0, 0, 0}));
    EXPECT_EQ(uniform_split(5000, costs, {0, 1, 2}), (std::vector<std::uint64_t>{1666, 1666, 833}));
    EXPECT_EQ(uniform_split(5000, costs, {2}), (std::vector<std::uint64_t>{0, 0, 2500}));
}

TEST(Heuristic, EstimateParams) {
    Tas t;
    const auto v = estimate_params(t.bundle, t.observed());
    EXPECT_DOUBLE_EQ(v[*t.bundle.model.find_param("p_ma")], 0.99);
    EXPECT_DOUBLE_EQ(v[*t.bundle.model.find_param("p_al")], 0.94);
    EXPECT_DOUBLE_EQ(v[*t.bundle.model.find_param("p_ph")], 0.95);

    ObservationFunction partial;
    partial.add(t.st("s2"), t.st("s4"), 99);
    partial.add(t.st("s2"), t.st("s3"), 1);
    partial.add(t.st("s5"), t.st("s9"), 3);
    try {
        estimate_params(t.bundle, partial);
        FAIL() << "expected ZeroObservations";
    } catch (const ZeroObservations& e) {
        EXPECT_EQ(e.states(), (std::vector<StateIndex>{t.st("s6")}));
    }
}

TEST(Heuristic, FirstRoundSplitsUniformly) {
    Tas t;
    const auto iv = intervals({{0, 1}, {0, 1}, {0, 1}});
    const auto a = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {}}, ObservationFunction{}, {});
    EXPECT_TRUE(a.uniform);
    EXPECT_EQ(a.nobs, (std::vector<std::uint64_t>{1666, 1666, 833}));
}

TEST(Heuristic, UnobservedComponentsShareTheRound) {
    Tas t;
    ObservationFunction o;
    o.add(t.st("s2"), t.st("s4"), 10);
    o.add(t.st("s5"), t.st("s9"), 10);
    const auto iv = intervals({{0, 1}, {0, 1}, {0, 1}});
    const auto a = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {}}, o, {});
    EXPECT_TRUE(a.uniform);
    EXPECT_EQ(a.nobs, (std::vector<std::uint64_t>{0, 0, 2500}));
}

TEST(Heuristic, D2PicksTheNearlyDecidedRequirement) {
    Tas t;
    // R1: ratio 0.01/0.64 = 0.0156; R2 and R3 straddle their bounds evenly
    const auto iv = intervals({{0.25, 0.9}, {0.0, 0.08}, {0.0, 0.0006}});
    const auto a = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {}}, t.observed(), {});
    EXPECT_NEAR(0.01 / 0.64, 0.0156, 1e-4);
    EXPECT_EQ(a.selected, (std::vector<std::string>{"R1"}));

    // no ratio below epsilon1: every requirement in U counts
    const auto wide = intervals({{0.1, 0.5}, {0.0, 0.08}, {0.0, 0.0006}});
    const auto b = allocate(5000, t.bundle, {t.reqs, wide, t.grads, {}}, t.observed(), {});
    EXPECT_EQ(b.selected, (std::vector<std::string>{"R1", "R2", "R3"}));
}

TEST(Heuristic, D2TiesGoToFileOrder) {
    Tas t;
    auto reqs = t.reqs;
    reqs[0].bound = Rational(1, 2);
    reqs[1].bound = Rational(1, 2);
    // binary-exact ends: both ratios are 1/7
    const auto iv = intervals({{0.4375, 0.9375}, {0.4375, 0.9375}, {0.0, 0.0006}});
    const auto a = allocate(5000, t.bundle, {reqs, iv, t.grads, {}}, t.observed(), {});
    EXPECT_EQ(a.selected, (std::vector<std::string>{"R1"}));
}

TEST(Heuristic, D2IgnoresUnboundedIntervals) {
    const auto bundle = load_model(kModels + "/webapp.pm");
    auto reqs = load_requirements(kModels + "/webapp.props");
    // as an upper bound, [2.7, inf) would give ratio 0.1/inf = 0
    reqs[2].rel = Relation::Less;
    const auto grads = expression_gradients(build_property_expressions(bundle.model, reqs));
    ObservationFunction o;
    for (auto z : bundle.parametric_states()) {
        for (const auto& tr : bundle.model.transitions[z]) o.add(z, tr.target, 50);
    }
    const auto iv = intervals({{0.1, 0.9}, {0.0, 0.1}, {2.7, std::numeric_limits<double>::infinity()}});
    const auto a = allocate(5000, bundle, {reqs, iv, grads, {}}, o, {});
    EXPECT_EQ(a.selected, (std::vector<std::string>{"R1", "R2", "R3"}));
    EXPECT_FALSE(a.uniform);
    EXPECT_LE(spend(a.nobs, component_costs(bundle)), 5000);
    for (double r : a.relevance) EXPECT_TRUE(std::isfinite(r));
}

TEST(Heuristic, InsensitiveComponentGetsNothing) {
    Tas t;
    // only R1 undecided; the pharmacy parameter does not occur in R1
    const auto iv = intervals({{0.1, 0.4}, {0.0, 0.01}, {0.0, 0.0001}});
    const auto a = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {"R2", "R3"}}, t.observed(), {});
    EXPECT_EQ(a.selected, (std::vector<std::string>{"R1"}));
    EXPECT_EQ(a.nobs[1], 0u);
    EXPECT_GT(a.nobs[2], 0u);
}

TEST(Heuristic, ZeroRelevanceFallsBackToUniform) {
    Tas t;
    // every bound outside its interval: U is empty
    const auto iv = intervals({{0.3, 0.4}, {0.05, 0.06}, {0.001, 0.002}});
    const auto a = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {}}, t.observed(), {});
    EXPECT_TRUE(a.selected.empty());
    EXPECT_TRUE(a.uniform);
    EXPECT_EQ(a.nobs, (std::vector<std::uint64_t>{1666, 1666, 833}));
}

TEST(HeuristicProperty, BudgetRespectAndNonStarvation) {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_int_distribution<int> num(1, 40);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = count(rng);
        std::vector<Rational> costs;
        std::vector<double> rel;
        for (int j = 0; j < m; ++j) {
            Rational c(num(rng), 4);
            c.canonicalize();
            costs.push_back(c);
            const double x = u(rng);
            rel.push_back(x < 0.2 ? 0.0 : (x > 0.95 ? kSurrogate * u(rng) : std::pow(10.0, 6 * u(rng) - 3)));
        }
        Rational rb(num(rng) * num(rng) * num(rng), num(rng));
        rb.canonicalize();
        const auto nobs = nobs_from_relevance(rb, rel, costs);
        ASSERT_LE(spend(nobs, costs), rb) << "trial " << trial;
        const Rational all = std::accumulate(costs.begin(), costs.end(), Rational(0));
        const double total = std::accumulate(rel.begin(), rel.end(), 0.0);
        if (rb >= all && total > 0) {
            EXPECT_TRUE(std::any_of(nobs.begin(), nobs.end(), [](auto n) { return n > 0; })) << "trial " << trial;
        }
        for (int j = 0; j < m; ++j) {
            if (rel[j] == 0) EXPECT_EQ(nobs[j], 0u);
        }
    }
}

TEST(HeuristicProperty, AllocateRespectsBudget) {
    Tas t;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> n(0, 400);
    std::uniform_int_distribution<int> rb(1, 20000);
    const auto costs = component_costs(t.bundle);
    for (int trial = 0; trial < 1000; ++trial) {
        ObservationFunction o;
        for (auto z : t.bundle.parametric_states()) {
            for (const auto& tr : t.bundle.model.transitions[z]) {
                if (const int c = n(rng)) o.add(z, tr.target, static_cast<std::uint64_t>(c));
            }
        }
        std::vector<PropertyInterval> iv(3);
        for (std::size_t i = 0; i < 3; ++i) {
            const double b = t.reqs[i].bound.get_d();
            iv[i].lo = b * 2 * u(rng);
            iv[i].hi = iv[i].lo + b * 2 * u(rng);
        }
        std::set<std::string> decided;
        if (u(rng) < 0.3) decided.insert("R2");
        const Rational budget(rb(rng));
        const auto a = allocate(budget, t.bundle, {t.reqs, iv, t.grads, decided}, o, {});
        ASSERT_LE(spend(a.nobs, costs), budget) << "trial " << trial;
    }
}

TEST(HeuristicProperty, D1ExcludedRequirementsDoNotMatter) {
    Tas t;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PropertyInterval> iv(3);
        for (std::size_t i = 0; i < 3; ++i) {
            const double b = t.reqs[i].bound.get_d();
            iv[i].lo = b * (0.2 + 0.7 * u(rng));
            iv[i].hi = b * (1.1 + u(rng));
        }
        // R3 entirely above its bound (outside U), or decided satisfied
        auto outside = iv;
        outside[2].lo = t.reqs[2].bound.get_d() * 1.5;
        outside[2].hi = outside[2].lo * 2;
        const auto with = allocate(5000, t.bundle, {t.reqs, outside, t.grads, {}}, t.observed(), {});
        const auto decided = allocate(5000, t.bundle, {t.reqs, iv, t.grads, {"R3"}}, t.observed(), {});

        std::vector<Requirement> two(t.reqs.begin(), t.reqs.begin() + 2);
        std::vector<PropertyInterval> iv2(iv.begin(), iv.begin() + 2);
        std::vector<ExprGradient> g2(t.grads.begin(), t.grads.begin() + 2);
        const auto without = allocate(5000, t.bundle, {two, iv2, g2, {}}, t.observed(), {});
        EXPECT_EQ(with.nobs, without.nobs) << "trial " << trial;
        EXPECT_EQ(decided.nobs, without.nobs) << "trial " << trial;
    }
}

TEST(HeuristicProperty, ScaleInvariance) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<Rational> costs{1, Rational(3, 2), 2, 5};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> rel(4);
        for (auto& r : rel) r = u(rng);
        const int k = static_cast<int>(u(rng) * 40) - 20;
        auto scaled = rel;
        for (auto& r : scaled) r = std::ldexp(r, k);
        EXPECT_EQ(nobs_from_relevance(4999, rel, costs), nobs_from_relevance(4999, scaled, costs));

        // an inexact factor moves each count by at most one
        const double c = 0.001 + 1000 * u(rng);
        for (auto& r : scaled = rel) r *= c;
        const auto a = nobs_from_relevance(4999, rel, costs);
        const auto b = nobs_from_relevance(4999, scaled, costs);
        for (std::size_t j = 0; j < a.size(); ++j) {
            EXPECT_LE(std::max(a[j], b[j]) - std::min(a[j], b[j]), 1u);
        }
    }
}

TEST(HeuristicProperty, CostMonotonicity) {
    std::mt19937_64 rng(45);
    std::uniform_int_distribution<int> num(1, 50);
    std::uniform_int_distribution<int> count(2, 6);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = count(rng);
        std::vector<Rational> costs;
        for (int j = 0; j < m; ++j) {
            Rational c(num(rng), num(rng));
            c.canonicalize();
            costs.push_back(c);
        }
        const std::vector<double> rel(m, 1.0);
        const auto nobs = nobs_from_relevance(Rational(num(rng) * 100), rel, costs);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (costs[i] <= costs[j]) EXPECT_GE(nobs[i], nobs[j]);
            }
        }
    }
}

}  // namespace
}  // namespace aqv
