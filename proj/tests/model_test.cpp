#include <gtest/gtest.h>

#include <random>

#include "aqv/model.hpp"
#include "support.hpp"

using namespace aqv;

namespace {

const char* kTasFragment = R"(dtmc
# invocation of the medical analysis service
param p_ma;
param p_al;
state s0 init;
state s2;
state s3;
state s4;
state s6;
state s8;
state s9;
label s8 "alarmFail";
label s9 "done";
label s4 "done";
trans s0 -> s2 : 0.7;
trans s0 -> s6 : 0.3;
trans s2 -> s4 : p_ma;
trans s2 -> s3 : 1 - p_ma;
trans s3 -> s3 : 1;
trans s4 -> s4 : 1;
trans s6 -> s9 : p_al;
trans s6 -> s8 : 1 - p_al;
trans s8 -> s8 : 1;
trans s9 -> s9 : 1;
reward s0 : 1;
reward s2 -> s4 : 0.5;
component medicalAnalysis cost 1 states { s2 };
component alarmService cost 2 states { s6 };
observe s2 -> s4 : 99;
observe s2 -> s3 : 1;
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return text.replace(at, from.size(), to);
}

void expect_model_error(const std::string& text, const std::string& fragment) {
    try {
        parse_model(text);
        ADD_FAILURE() << "accepted: " << fragment;
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Model, ParsesTasFragment) {
    const auto b = parse_model(kTasFragment);
    const auto& m = b.model;
    EXPECT_EQ(m.params, (std::vector<std::string>{"p_ma", "p_al"}));
    EXPECT_EQ(m.num_states(), 7u);
    EXPECT_EQ(m.states[m.init], "s0");
    const auto s2 = *m.find_state("s2");
    const auto s4 = *m.find_state("s4");
    EXPECT_TRUE(m.is_parametric(s2));
    EXPECT_FALSE(m.is_parametric(*m.find_state("s0")));
    EXPECT_EQ(m.probability(s2, s4), RationalFunction::variable(0));
    EXPECT_EQ(m.transition_reward(s2, s4), Rational(1, 2));
    EXPECT_EQ(m.state_rewards[m.init], 1);
    EXPECT_EQ(b.parametric_states(), (std::vector<StateIndex>{s2, *m.find_state("s6")}));
    EXPECT_EQ(b.components.size(), 2u);
    EXPECT_EQ(b.components[1].cost, 2);
    EXPECT_EQ(b.initial_obs.count(s2, s4), 99u);
    EXPECT_EQ(b.initial_obs.total_from(s2), 100u);
    EXPECT_EQ(*b.component_of_state[s2], 0u);
    EXPECT_FALSE(b.component_of_state[m.init].has_value());
}

TEST(Model, AbsorbingSelfLoop) {
    const auto b = parse_model("dtmc\nstate s10 init;\ntrans s10 -> s10 : 1;\n");
    EXPECT_EQ(b.model.transitions[0].size(), 1u);
    EXPECT_TRUE(b.parametric_states().empty());
}

TEST(Model, RejectsBadModels) {
    const std::string t = kTasFragment;
    expect_model_error(replace(t, "1 - p_ma", "p_ma"), "sum");
    expect_model_error(replace(t, "state s3;", "state s3;\nstate s3;"), "duplicate state");
    expect_model_error(replace(t, "param p_al;", "param p_al;\nparam p_al;"), "duplicate parameter");
    expect_model_error(replace(t, "states { s6 }", "states { s6, s2 }"), "belongs to components");
    expect_model_error(replace(t, "component alarmService cost 2 states { s6 };", ""), "not assigned");
    expect_model_error(replace(t, "observe s2 -> s3 : 1;", "observe s0 -> s2 : 1;"), "not a parametric state");
    expect_model_error(replace(t, "trans s6 -> s9 : p_al;\ntrans s6 -> s8 : 1 - p_al;",
                               "trans s6 -> s9 : p_ma;\ntrans s6 -> s8 : 1 - p_ma;"),
                       "shared");
    expect_model_error(replace(t, "state s0 init;", "state s0;"), "init");
    expect_model_error(replace(t, "trans s0 -> s6 : 0.3;", "trans s0 -> s6 : 0.3"), "line");
    expect_model_error(replace(t, "trans s0 -> s6 : 0.3;", "trans s0 -> s7 : 0.3;"), "unknown state");
    expect_model_error(replace(t, "reward s0 : 1;", "reward s0 : -1;"), "non-negative");
    expect_model_error(replace(t, "cost 2", "cost 0"), "positive cost");
    expect_model_error(replace(t, "trans s2 -> s4 : p_ma;", "trans s2 -> s4 : p_ma * p_ma;"), "s2");
}

TEST(Model, SyntaxErrorsCarryLineNumbers) {
    try {
        parse_model("dtmc\nstate a init;\nbogus a;\n");
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Model, PrintParseRoundTrip) {
    const auto b = parse_model(kTasFragment);
    const auto again = parse_model(print_model(b));
    EXPECT_EQ(again.model, b.model);
    EXPECT_EQ(again.components, b.components);
    EXPECT_EQ(again.initial_obs, b.initial_obs);
}

TEST(Model, RandomRoundTrip) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        auto m = oracle::random_dtmc(rng, 3 + t % 10, 1 + t % 3);
        // One component per parametric state, which keeps parameters unshared
        // only when each parameter is used by one state; skip the others.
        std::vector<Component> comps;
        for (std::size_t s = 0; s < m.num_states(); ++s) {
            if (m.is_parametric(s)) comps.push_back({"c" + std::to_string(s), Rational(1), {s}});
        }
        ModelBundle b;
        try {
            b = make_bundle(m, comps, {});
        } catch (const ModelError&) {
            continue;
        }
        const auto again = parse_model(print_model(b));
        EXPECT_EQ(again.model, b.model);
        EXPECT_EQ(again.components, b.components);
    }
}

TEST(Model, ZIsUnionOfComponentStates) {
    const auto b = parse_model(kTasFragment);
    std::vector<StateIndex> from_components;
    for (const auto& c : b.components) {
        from_components.insert(from_components.end(), c.z_states.begin(), c.z_states.end());
    }
    std::sort(from_components.begin(), from_components.end());
    EXPECT_EQ(from_components, b.parametric_states());
}

TEST(Model, ParamsOfComponent) {
    const auto b = parse_model(kTasFragment);
    EXPECT_EQ(params_of_component(b.model, b.components[1]), std::vector<std::size_t>{1});
    const auto three = parse_model(R"(dtmc
param p1;
param p2;
state z init;
state a;
state c;
state d;
trans z -> a : p1;
trans z -> c : p2;
trans z -> d : 1 - p1 - p2;
trans a -> a : 1;
trans c -> c : 1;
trans d -> d : 1;
component only cost 3 states { z };
)");
    EXPECT_EQ(params_of_component(three.model, three.components[0]), (std::vector<std::size_t>{0, 1}));
    const auto& shape = three.shapes.at(0);
    EXPECT_EQ(shape.bare.size(), 2u);
    ASSERT_TRUE(shape.derived_edge.has_value());
    EXPECT_EQ(*shape.derived_edge, 2u);
}

TEST(Observations, MergeIsPointwise) {
    ObservationFunction a;
    a.add(2, 4, 3);
    ObservationFunction b;
    b.add(2, 4, 2);
    b.add(2, 3, 1);
    const auto c = merge_observations(a, b);
    EXPECT_EQ(c.count(2, 4), 5u);
    EXPECT_EQ(c.count(2, 3), 1u);
    EXPECT_EQ(c.count(0, 0), 0u);
    EXPECT_EQ(merge_observations(a, {}), a);
    EXPECT_TRUE(merge_observations({}, {}).empty());
}

TEST(Observations, MergeIsAssociativeAndCommutative) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> s(0, 4);
    std::uniform_int_distribution<int> n(0, 9);
    auto random_obs = [&] {
        ObservationFunction o;
        for (int i = 0; i < 6; ++i) o.add(s(rng), s(rng), n(rng));
        return o;
    };
    for (int t = 0; t < 50; ++t) {
        const auto a = random_obs();
        const auto b = random_obs();
        const auto c = random_obs();
        EXPECT_EQ(merge_observations(a, b), merge_observations(b, a));
        EXPECT_EQ(merge_observations(merge_observations(a, b), c), merge_observations(a, merge_observations(b, c)));
    }
}

TEST(Model, FrequencyEstimate) {
    auto b = parse_model(kTasFragment);
    auto est = frequency_estimate(b, b.initial_obs);
    EXPECT_FALSE(est.valuation.has_value());
    EXPECT_EQ(est.unobserved, std::vector<StateIndex>{*b.model.find_state("s6")});
    auto obs = b.initial_obs;
    obs.add(*b.model.find_state("s6"), *b.model.find_state("s9"), 3);
    obs.add(*b.model.find_state("s6"), *b.model.find_state("s8"), 1);
    est = frequency_estimate(b, obs);
    ASSERT_TRUE(est.valuation.has_value());
    EXPECT_DOUBLE_EQ((*est.valuation)[0], 0.99);
    EXPECT_DOUBLE_EQ((*est.valuation)[1], 0.75);
}
