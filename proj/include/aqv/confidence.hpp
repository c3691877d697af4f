#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqv/interval.hpp"
#include "aqv/model.hpp"
#include "aqv/pmc.hpp"

namespace aqv {

class ConfidenceError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Inverse CDF of the chi-square distribution.
double chi_square_quantile(double p, double df = 1.0);

/// Goodman simultaneous intervals for the k = counts.size() multinomial
/// proportions at confidence alpha_state. All intervals are [0,1] when no
/// sample has been observed.
std::vector<Interval> state_ci(std::span<const std::uint64_t> counts, double alpha_state);

/// sum of params (with multiplicity) must lie in range.
struct SumConstraint {
    StateIndex state = 0;
    std::vector<std::size_t> params;
    Interval range;
};

/// Confidence region for the parameters: a box intersected with one
/// linear constraint per parametric state.
struct ParamBox {
    std::vector<Interval> params;
    std::vector<SumConstraint> constraints;
    /// Parameter occurs on an edge of a state with at least one observation.
    std::vector<bool> informed;
    double alpha_state = 0.0;

    bool feasible(std::span<const double> point, double slack = 1e-12) const;
    /// Shrinks `box` to what the constraints allow. Returns false when the
    /// box holds no feasible point.
    bool tighten(std::vector<Interval>& box) const;
};

/// Number of parametric states owning a parameter of some expression.
std::size_t relevant_state_count(const ModelBundle& bundle, std::span<const PropertyExpression> exprs);

/// Per-state intervals at alpha^(1/c), c from the undecided expressions.
ParamBox build_param_box(const ModelBundle& bundle, const ObservationFunction& obs, double alpha,
                         std::span<const PropertyExpression> undecided);

struct PropertyInterval {
    std::string requirement_id;
    Requirement::Kind kind = Requirement::Kind::Probability;
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.0;
};

struct BoundOptions {
    /// Sub-boxes examined per direction (lower and upper bound each).
    std::size_t max_boxes = 4096;
    /// Stop once the outer bound is within this distance of a feasible value.
    double tolerance = 1e-4;
};

/// Outer bound of the range of pe.expr over the region, clipped to [0,1]
/// for probabilities and [0, inf) for rewards.
PropertyInterval property_interval(const PropertyExpression& pe, const ParamBox& box, double alpha,
                                   const BoundOptions& opts = {});

}  // namespace aqv
