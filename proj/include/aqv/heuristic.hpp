#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aqv/confidence.hpp"
#include "aqv/model.hpp"
#include "aqv/pmc.hpp"
#include "aqv/props.hpp"

namespace aqv {

struct HeuristicConfig {
    double epsilon1 = 0.15;
    double epsilon2 = 1e-6;
};

/// Stand-in for a derivative, or a weight, that cannot be evaluated.
inline constexpr double kSurrogate = 1e12;

struct Allocation {
    std::vector<std::uint64_t> nobs;
    std::vector<double> relevance;
    std::vector<std::string> selected;
    /// Round budget split evenly (zero observations or zero relevance).
    bool uniform = false;
};

double wrong_end(Relation rel, double lo, double hi);
double right_end(Relation rel, double lo, double hi);

class ZeroObservations : public std::runtime_error {
   public:
    explicit ZeroObservations(std::vector<StateIndex> states);
    const std::vector<StateIndex>& states() const { return states_; }

   private:
    std::vector<StateIndex> states_;
};

/// Frequency estimate of every parameter. Throws ZeroObservations naming the
/// parametric states without any observation.
Valuation estimate_params(const ModelBundle& bundle, const ObservationFunction& obs);

/// Partial derivatives of one property expression, one entry per parameter
/// it depends on. Computed once and reused every round.
struct ExprGradient {
    std::vector<std::pair<std::size_t, RationalFunction>> partials;
};

std::vector<ExprGradient> expression_gradients(const std::vector<PropertyExpression>& exprs);

/// floor(rbudget * relevance_j / sum * 1/cost_j), never exceeding rbudget.
std::vector<std::uint64_t> nobs_from_relevance(const Rational& rbudget, const std::vector<double>& relevance,
                                               const std::vector<Rational>& costs);

/// floor((rbudget / |which|) / cost_j) for j in which, 0 elsewhere.
std::vector<std::uint64_t> uniform_split(const Rational& rbudget, const std::vector<Rational>& costs,
                                         const std::vector<std::size_t>& which);

/// Per-requirement inputs, aligned with the requirement list.
struct HeuristicInput {
    const std::vector<Requirement>& requirements;
    const std::vector<PropertyInterval>& intervals;
    const std::vector<ExprGradient>& gradients;
    const std::set<std::string>& decided;
};

/// New observations per component for one round.
Allocation allocate(const Rational& rbudget, const ModelBundle& bundle, const HeuristicInput& in,
                    const ObservationFunction& obs, const HeuristicConfig& cfg = {});

std::vector<Rational> component_costs(const ModelBundle& bundle);

}  // namespace aqv
