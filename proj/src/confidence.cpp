#include "aqv/confidence.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "aqv/numeric_rational.hpp"

namespace aqv {

double chi_square_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw ConfidenceError("chi-square quantile needs p in (0,1)");
    if (!(df > 0.0)) throw ConfidenceError("chi-square quantile needs df > 0");
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

std::vector<Interval> state_ci(std::span<const std::uint64_t> counts, double alpha_state) {
    const auto k = counts.size();
    if (k < 2) throw ConfidenceError("state_ci needs at least two outcomes");
    if (!(alpha_state > 0.0 && alpha_state < 1.0)) throw ConfidenceError("confidence level must lie in (0,1)");
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    std::vector<Interval> out(k, Interval(0.0, 1.0));
    if (n == 0) return out;
    const double a = chi_square_quantile(1.0 - (1.0 - alpha_state) / static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
        const double x = static_cast<double>(counts[i]);
        const double spread = std::sqrt(a * (a + 4.0 * x * (n - x) / n));
        const double denom = 2.0 * (n + a);
        out[i] = {std::clamp((a + 2.0 * x - spread) / denom, 0.0, 1.0),
                  std::clamp((a + 2.0 * x + spread) / denom, 0.0, 1.0)};
    }
    return out;
}

bool ParamBox::feasible(std::span<const double> point, double slack) const {
    for (const auto& c : constraints) {
        double sum = 0;
        for (auto p : c.params) sum += point[p];
        if (sum < c.range.lo - slack || sum > c.range.hi + slack) return false;
    }
    return true;
}

bool ParamBox::tighten(std::vector<Interval>& box) const {
    constexpr double slack = 1e-12;
    for (int pass = 0; pass < 4; ++pass) {
        bool changed = false;
        for (const auto& c : constraints) {
            double sum_lo = 0;
            double sum_hi = 0;
            for (auto p : c.params) {
                sum_lo += box[p].lo;
                sum_hi += box[p].hi;
            }
            if (sum_lo > c.range.hi + slack || sum_hi < c.range.lo - slack) return false;
            for (auto p : c.params) {
                const double lo = c.range.lo - (sum_hi - box[p].hi);
                const double hi = c.range.hi - (sum_lo - box[p].lo);
                if (lo > box[p].lo + slack) {
                    box[p].lo = lo;
                    changed = true;
                }
                if (hi < box[p].hi - slack) {
                    box[p].hi = hi;
                    changed = true;
                }
                if (box[p].lo > box[p].hi) {
                    if (box[p].lo > box[p].hi + slack) return false;
                    box[p].hi = box[p].lo;
                }
            }
        }
        if (!changed) break;
    }
    return true;
}

std::size_t relevant_state_count(const ModelBundle& bundle, std::span<const PropertyExpression> exprs) {
    std::set<std::size_t> used;
    for (const auto& pe : exprs) {
        for (auto p : pe.expr.parameters()) used.insert(p);
    }
    std::size_t c = 0;
    for (const auto& shape : bundle.shapes) {
        const bool hit = std::any_of(shape.bare.begin(), shape.bare.end(),
                                     [&](const auto& b) { return used.count(b.param) > 0; });
        if (hit) ++c;
    }
    return c;
}

ParamBox build_param_box(const ModelBundle& bundle, const ObservationFunction& obs, double alpha,
                         std::span<const PropertyExpression> undecided) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfidenceError("alpha must lie in (0,1)");
    const auto& m = bundle.model;
    const auto c = relevant_state_count(bundle, undecided);
    ParamBox box;
    box.alpha_state = c == 0 ? alpha : std::pow(alpha, 1.0 / static_cast<double>(c));
    box.params.assign(m.params.size(), Interval(0.0, 1.0));
    box.informed.assign(m.params.size(), false);

    std::vector<std::vector<Interval>> per_param(m.params.size());
    for (const auto& shape : bundle.shapes) {
        const auto z = shape.state;
        const auto& edges = m.transitions[z];
        std::vector<std::uint64_t> counts(edges.size());
        std::uint64_t total = 0;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            counts[e] = obs.count(z, edges[e].target);
            total += counts[e];
        }
        const auto ci = state_ci(counts, box.alpha_state);
        SumConstraint sc;
        sc.state = z;
        for (const auto& b : shape.bare) {
            per_param[b.param].push_back(ci[b.edge]);
            if (total > 0) box.informed[b.param] = true;
            sc.params.push_back(b.param);
        }
        const double fixed = 1.0 - shape.constant_mass.get_d();
        if (shape.derived_edge) {
            const auto d = ci[*shape.derived_edge];
            sc.range = {fixed - d.hi, fixed - d.lo};
        } else {
            sc.range = Interval(fixed);
        }
        box.constraints.push_back(std::move(sc));
    }
    for (std::size_t p = 0; p < per_param.size(); ++p) {
        if (per_param[p].empty()) continue;
        Interval meet = per_param[p].front();
        Interval join = meet;
        for (const auto& iv : per_param[p]) {
            meet = intersect(meet, iv);
            join = hull(join, iv);
        }
        box.params[p] = meet.lo <= meet.hi ? meet : join;
    }
    std::vector<Interval> tightened = box.params;
    if (box.tighten(tightened)) box.params = std::move(tightened);
    return box;
}

namespace {

Interval natural_range(Requirement::Kind kind) {
    return kind == Requirement::Kind::Probability ? Interval(0.0, 1.0)
                                                  : Interval(0.0, std::numeric_limits<double>::infinity());
}

/// Best-first branch and bound for the minimum of sign * f over the
/// feasible part of a box.
class Bounder {
   public:
    Bounder(const RationalFunction& f, const ParamBox& region, std::vector<std::size_t> dims, double sign)
        : f_(f), region_(region), dims_(std::move(dims)), sign_(sign) {
        for (auto d : dims_) grad_.emplace_back(partial_derivative(f, d));
    }

    /// Lower bound on min(sign * f) over the feasible part of root.
    double minimise(const std::vector<Interval>& root, const BoundOptions& opts) {
        struct Node {
            double lower;
            std::vector<Interval> box;
            bool operator<(const Node& o) const { return lower > o.lower; }
        };
        std::priority_queue<Node> queue;
        incumbent_ = std::numeric_limits<double>::infinity();
        std::size_t examined = 0;
        auto consider = [&](std::vector<Interval> box) {
            ++examined;
            if (!region_.tighten(box)) return;
            const double lower = enclose(box).lo;
            probe(box);
            if (lower > incumbent_) return;
            queue.push({lower, std::move(box)});
        };
        consider(root);
        while (!queue.empty()) {
            const Node& top = queue.top();
            if (incumbent_ - top.lower < opts.tolerance || examined + 2 > opts.max_boxes) return top.lower;
            Node node = top;
            queue.pop();
            const auto d = widest(node.box);
            if (node.box[d].width() <= 0.0) return node.lower;
            const double cut = node.box[d].mid();
            auto left = node.box;
            auto right = std::move(node.box);
            left[d].hi = cut;
            right[d].lo = cut;
            consider(std::move(left));
            consider(std::move(right));
        }
        return incumbent_;
    }

   private:
    Interval enclose(const std::vector<Interval>& box) const {
        const Interval natural = f_(std::span<const Interval>(box));
        std::vector<double> centre(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) centre[i] = box[i].is_bounded() ? box[i].mid() : 0.0;
        Interval mean_value(f_(std::span<const double>(centre)));
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const auto d = dims_[k];
            mean_value = mean_value + grad_[k](std::span<const Interval>(box)) * (box[d] - Interval(centre[d]));
        }
        Interval e = natural;
        if (!std::isnan(mean_value.lo) && !std::isnan(mean_value.hi)) {
            const Interval both = intersect(natural, mean_value);
            if (both.lo <= both.hi) e = both;
        }
        if (std::isnan(e.lo) || std::isnan(e.hi)) e = Interval::entire();
        return sign_ > 0 ? e : -e;
    }

    void probe(const std::vector<Interval>& box) {
        std::vector<double> centre(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) centre[i] = box[i].mid();
        if (!region_.feasible(centre)) return;
        const double den = f_.denominator(std::span<const double>(centre));
        if (std::abs(den) <= 1e-12) return;
        const double v = sign_ * f_.numerator(std::span<const double>(centre)) / den;
        if (std::isfinite(v)) incumbent_ = std::min(incumbent_, v);
    }

    std::size_t widest(const std::vector<Interval>& box) const {
        std::size_t best = dims_.front();
        for (auto d : dims_) {
            if (box[d].width() > box[best].width()) best = d;
        }
        return best;
    }

    NumericRational f_;
    const ParamBox& region_;
    std::vector<std::size_t> dims_;
    std::vector<NumericRational> grad_;
    double sign_;
    double incumbent_ = 0.0;
};

}  // namespace

PropertyInterval property_interval(const PropertyExpression& pe, const ParamBox& box, double alpha,
                                   const BoundOptions& opts) {
    PropertyInterval out{pe.requirement_id, pe.kind, 0.0, 0.0, alpha};
    const Interval range = natural_range(pe.kind);
    if (pe.expr.is_constant()) {
        const double v = std::clamp(pe.expr.constant_value().get_d(), range.lo, range.hi);
        out.lo = out.hi = v;
        return out;
    }
    const auto dims = pe.expr.parameters();
    const bool informed = std::any_of(dims.begin(), dims.end(), [&](auto p) { return box.informed[p]; });
    if (!informed) {
        out.lo = range.lo;
        out.hi = range.hi;
        return out;
    }
    // Mutually inconsistent state intervals leave no feasible point; bound
    // over the plain box then.
    ParamBox region = box;
    auto root = box.params;
    if (!region.tighten(root)) {
        region.constraints.clear();
        root = box.params;
    }
    Bounder lower(pe.expr, region, dims, 1.0);
    Bounder upper(pe.expr, region, dims, -1.0);
    double lo = lower.minimise(root, opts);
    double hi = -upper.minimise(root, opts);
    if (std::isnan(lo)) lo = -std::numeric_limits<double>::infinity();
    if (std::isnan(hi)) hi = std::numeric_limits<double>::infinity();
    // Rounding in the enclosures is not directed.
    lo -= 1e-12 * std::max(1.0, std::abs(lo));
    hi += 1e-12 * std::max(1.0, std::abs(hi));
    out.lo = std::clamp(lo, range.lo, range.hi);
    out.hi = std::clamp(hi, range.lo, range.hi);
    if (out.lo > out.hi) out.lo = out.hi;
    return out;
}

}  // namespace aqv
