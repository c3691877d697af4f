#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqv/rational_function.hpp"

namespace aqv {

using StateIndex = std::size_t;
/// Characteristic vector over the model's states.
using StateSet = std::vector<bool>;

class ModelError : public std::runtime_error {
   public:
    explicit ModelError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

   private:
    std::size_t line_;
};

struct Transition {
    StateIndex target;
    RationalFunction prob;
    bool operator==(const Transition&) const = default;
};

struct ParametricDtmc {
    std::vector<std::string> params;
    std::vector<std::string> states;
    StateIndex init = 0;
    std::vector<std::vector<Transition>> transitions;
    std::vector<std::set<std::string>> labels;
    std::vector<Rational> state_rewards;
    std::map<std::pair<StateIndex, StateIndex>, Rational> transition_rewards;

    std::size_t num_states() const { return states.size(); }
    std::optional<StateIndex> find_state(std::string_view name) const;
    std::optional<std::size_t> find_param(std::string_view name) const;
    /// Sum of the expressions labelling u -> v (zero if there is no edge).
    RationalFunction probability(StateIndex u, StateIndex v) const;
    /// True when some outgoing expression is not constant.
    bool is_parametric(StateIndex s) const;
    Rational transition_reward(StateIndex u, StateIndex v) const;

    bool operator==(const ParametricDtmc&) const = default;
};

struct Component {
    std::string name;
    Rational cost;
    std::vector<StateIndex> z_states;
    bool operator==(const Component&) const = default;
};

/// Observed transition counts O(z, s); unrecorded pairs count 0.
class ObservationFunction {
   public:
    using Key = std::pair<StateIndex, StateIndex>;

    std::uint64_t count(StateIndex z, StateIndex s) const;
    std::uint64_t total_from(StateIndex z) const;
    void add(StateIndex z, StateIndex s, std::uint64_t n);
    bool empty() const { return counts_.empty(); }
    const std::map<Key, std::uint64_t>& counts() const { return counts_; }
    bool operator==(const ObservationFunction&) const = default;

   private:
    std::map<Key, std::uint64_t> counts_;
};

ObservationFunction merge_observations(const ObservationFunction& a, const ObservationFunction& b);

/// Outgoing-edge layout of a parametric state: every edge is a constant, a
/// bare parameter, or the complement 1 - (bare parameters + constants).
struct ParametricStateShape {
    struct BareEdge {
        std::size_t edge;
        std::size_t param;
        bool operator==(const BareEdge&) const = default;
    };
    StateIndex state = 0;
    std::vector<BareEdge> bare;
    std::vector<std::size_t> constant_edges;
    Rational constant_mass;
    std::optional<std::size_t> derived_edge;
};

/// A validated model together with its component annotations and O_0.
struct ModelBundle {
    ParametricDtmc model;
    std::vector<Component> components;
    ObservationFunction initial_obs;
    /// One entry per parametric state, ordered by state index.
    std::vector<ParametricStateShape> shapes;
    /// Component index per state, nullopt outside Z.
    std::vector<std::optional<std::size_t>> component_of_state;

    const ParametricStateShape* shape_of(StateIndex s) const;
    std::vector<StateIndex> parametric_states() const;
};

/// Structural checks plus the numeric transition-sum check (200 random
/// valuations in (0,1)^k and, when given, the estimate point).
void validate_dtmc(const ParametricDtmc& m, const std::optional<Valuation>& estimate = std::nullopt);

/// Throws ModelError naming the state and edge when a parametric state does
/// not have the supported edge shape.
std::vector<ParametricStateShape> analyze_parametric_states(const ParametricDtmc& m);

ModelBundle make_bundle(ParametricDtmc model, std::vector<Component> components, ObservationFunction initial_obs);

ModelBundle parse_model(std::string_view text);
ModelBundle load_model(const std::string& path);
std::string print_model(const ModelBundle& bundle);

std::vector<std::size_t> params_of_component(const ParametricDtmc& m, const Component& c);

/// Frequency estimate O(z,s)/sum O(z,.) for every bare-parameter edge,
/// pooling all states a parameter appears in. States in Z without any
/// observation are reported in `unobserved`, in which case no valuation is
/// returned.
struct FrequencyEstimate {
    std::optional<Valuation> valuation;
    std::vector<StateIndex> unobserved;
};
FrequencyEstimate frequency_estimate(const ModelBundle& bundle, const ObservationFunction& obs);

std::string read_file(const std::string& path);

}  // namespace aqv
