#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aqv/model.hpp"

namespace aqv {

class PropsError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised for PCTL operators outside the supported fragment.
class UnsupportedFragment : public PropsError {
   public:
    explicit UnsupportedFragment(const std::string& op)
        : PropsError("unsupported-fragment: operator " + op + " is not supported"), op_(op) {}
    const std::string& op() const { return op_; }

   private:
    std::string op_;
};

/// Boolean combination of atomic propositions; never contains P or R.
struct StateFormula {
    enum class Kind { True, False, Atom, Not, And, Or };
    Kind kind = Kind::True;
    std::string atom;
    std::vector<StateFormula> operands;

    static StateFormula truth() { return {}; }
    static StateFormula make_atom(std::string a) { return {Kind::Atom, std::move(a), {}}; }
    static StateFormula negation(StateFormula f) { return {Kind::Not, {}, {std::move(f)}}; }
    static StateFormula conjunction(StateFormula a, StateFormula b) { return {Kind::And, {}, {std::move(a), std::move(b)}}; }
    static StateFormula disjunction(StateFormula a, StateFormula b) { return {Kind::Or, {}, {std::move(a), std::move(b)}}; }

    bool operator==(const StateFormula&) const = default;
};

/// X phi, phi1 U phi2 or phi1 U<=k phi2. F is stored as true U phi.
struct PathFormula {
    enum class Kind { Next, Until, BoundedUntil };
    Kind kind = Kind::Until;
    StateFormula lhs;
    StateFormula rhs;
    std::uint32_t bound = 0;

    bool operator==(const PathFormula&) const = default;
};

enum class Relation { Less, LessEqual, Greater, GreaterEqual, Query };

struct Requirement {
    enum class Kind { Probability, Reward };
    std::string id;
    Kind kind = Kind::Probability;
    Relation rel = Relation::Less;
    Rational bound;
    PathFormula path;       // Probability
    StateFormula target;    // Reward: R[F target]
    std::optional<std::string> start_label;

    bool operator==(const Requirement&) const = default;
};

/// One requirement per line. `P=?`/`R=?` value queries are only accepted
/// when allow_queries is set.
std::vector<Requirement> parse_requirements(std::string_view text, bool allow_queries = false);
std::vector<Requirement> load_requirements(const std::string& path, bool allow_queries = false);

std::string to_string(const StateFormula& f);
std::string to_string(const Requirement& r);
std::string to_string(Relation rel);

StateSet sat_states(const ParametricDtmc& m, const StateFormula& f);

/// Start state of a requirement: init, or the unique state carrying start_label.
StateIndex start_state(const ParametricDtmc& m, const Requirement& r);

}  // namespace aqv
