#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqv/model.hpp"
#include "aqv/props.hpp"

namespace aqv {

class PmcError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// R[F phi] from a state whose reachable bottom SCCs miss the target.
class InfiniteReward : public PmcError {
   public:
    InfiniteReward(const std::string& what, std::vector<StateIndex> witness)
        : PmcError(what), witness_(std::move(witness)) {}
    const std::vector<StateIndex>& witness() const { return witness_; }

   private:
    std::vector<StateIndex> witness_;
};

class BoundLimitExceeded : public PmcError {
   public:
    using PmcError::PmcError;
};

/// Order in which transient states are eliminated.
enum class EliminationOrder {
    /// Smallest in-degree * out-degree first, recomputed after every step.
    MinFill,
    /// Highest state index first; used to cross-check MinFill.
    ReverseIndex,
};

struct PmcOptions {
    EliminationOrder order = EliminationOrder::MinFill;
    std::uint32_t max_bounded_k = 100;
};

/// Closed-form property of one requirement.
struct PropertyExpression {
    std::string requirement_id;
    Requirement::Kind kind = Requirement::Kind::Probability;
    RationalFunction expr;
    StateIndex start = 0;
};

/// Probability of phi1 U phi2 from `start`, by state elimination.
RationalFunction reach_prob_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi1,
                                 const StateSet& phi2, const PmcOptions& opts = {});

/// Expected reward accumulated until reaching `target`.
RationalFunction reach_reward_expr(const ParametricDtmc& m, StateIndex start, const StateSet& target,
                                   const PmcOptions& opts = {});

/// Probability of phi1 U<=k phi2, a polynomial when the edges are polynomials.
RationalFunction bounded_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi1, const StateSet& phi2,
                              std::uint32_t k, const PmcOptions& opts = {});

RationalFunction next_expr(const ParametricDtmc& m, StateIndex start, const StateSet& phi);

PropertyExpression property_expression(const ParametricDtmc& m, const Requirement& r, const PmcOptions& opts = {});

std::vector<PropertyExpression> build_property_expressions(const ParametricDtmc& m,
                                                           const std::vector<Requirement>& reqs,
                                                           const PmcOptions& opts = {});

}  // namespace aqv
