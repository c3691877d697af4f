#include "aqv/props.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace aqv {

namespace {

struct Token {
    enum class Type { Ident, String, Number, Symbol, End };
    Type type;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const auto start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Token::Type::Ident, std::string(s.substr(start, i - start)), start});
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                ++i;
                if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            out.push_back({Token::Type::Number, std::string(s.substr(start, i - start)), start});
        } else if (c == '"') {
            ++i;
            while (i < s.size() && s[i] != '"') ++i;
            if (i >= s.size()) throw PropsError("unterminated string at position " + std::to_string(start));
            out.push_back({Token::Type::String, std::string(s.substr(start + 1, i - start - 1)), start});
            ++i;
        } else if ((c == '<' || c == '>') && i + 1 < s.size() && s[i + 1] == '=') {
            out.push_back({Token::Type::Symbol, std::string(s.substr(start, 2)), start});
            i += 2;
        } else if (std::string_view("<>=?[]()!&|:/").find(c) != std::string_view::npos) {
            out.push_back({Token::Type::Symbol, std::string(1, c), start});
            ++i;
        } else {
            throw PropsError("unexpected character '" + std::string(1, c) + "' at position " + std::to_string(start));
        }
    }
    out.push_back({Token::Type::End, "", s.size()});
    return out;
}

class LineParser {
   public:
    LineParser(std::string_view line, bool allow_queries) : tokens_(tokenize(line)), allow_queries_(allow_queries) {}

    Requirement parse() {
        Requirement r;
        r.id = expect_ident("requirement id");
        expect_symbol(":");
        const auto op = expect_ident("P or R");
        if (op != "P" && op != "R") fail("expected P or R, found '" + op + "'");
        r.kind = op == "P" ? Requirement::Kind::Probability : Requirement::Kind::Reward;
        r.rel = relation();
        if (r.rel == Relation::Query) {
            if (!allow_queries_) fail("value queries (=?) are not requirements; give a bound");
            r.bound = 0;
        } else {
            r.bound = number();
            if (r.kind == Requirement::Kind::Probability && (r.bound < 0 || r.bound > 1)) {
                fail("probability bound must lie in [0,1]");
            }
            if (r.bound < 0) fail("reward bound must be non-negative");
        }
        expect_symbol("[");
        if (r.kind == Requirement::Kind::Probability) {
            r.path = path();
        } else {
            reward_body(r);
        }
        expect_symbol("]");
        if (peek().type == Token::Type::Ident && peek().text == "from") {
            advance();
            if (peek().type != Token::Type::String) fail("expected quoted atom after 'from'");
            r.start_label = advance().text;
        }
        if (peek().type != Token::Type::End) fail("trailing input '" + peek().text + "'");
        return r;
    }

   private:
    const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw PropsError(what + " at position " + std::to_string(peek().pos));
    }

    bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).type == Token::Type::Symbol && peek(ahead).text == s;
    }
    bool is_ident(std::string_view s) const { return peek().type == Token::Type::Ident && peek().text == s; }

    void expect_symbol(std::string_view s) {
        if (!is_symbol(s)) fail("expected '" + std::string(s) + "'");
        advance();
    }

    std::string expect_ident(const std::string& what) {
        if (peek().type != Token::Type::Ident) fail("expected " + what);
        return advance().text;
    }

    Relation relation() {
        if (is_symbol("<")) return advance(), Relation::Less;
        if (is_symbol("<=")) return advance(), Relation::LessEqual;
        if (is_symbol(">")) return advance(), Relation::Greater;
        if (is_symbol(">=")) return advance(), Relation::GreaterEqual;
        if (is_symbol("=") && is_symbol("?", 1)) {
            advance();
            advance();
            return Relation::Query;
        }
        fail("expected a relation (<, <=, >, >=)");
    }

    Rational number() {
        if (peek().type != Token::Type::Number) fail("expected a number");
        std::string text = advance().text;
        if (is_symbol("/") && peek(1).type == Token::Type::Number) {
            advance();
            text += "/" + advance().text;
        }
        try {
            return parse_expr(text, {}).constant_value();
        } catch (const std::exception& e) {
            fail(std::string("malformed number: ") + e.what());
        }
    }

    std::uint32_t step_bound() {
        if (peek().type != Token::Type::Number) fail("expected a step bound");
        const auto text = advance().text;
        if (text.find_first_not_of("0123456789") != std::string::npos) fail("step bound must be an integer");
        const auto k = std::stoul(text);
        if (k < 1) fail("step bound must be at least 1");
        return static_cast<std::uint32_t>(k);
    }

    void reward_body(Requirement& r) {
        if (is_ident("F")) {
            advance();
            r.target = state_formula();
            return;
        }
        if (is_ident("I")) throw UnsupportedFragment("I=k");
        if (is_ident("C")) throw UnsupportedFragment("C<=k");
        if (is_ident("S")) throw UnsupportedFragment("S");
        fail("expected F after R[");
    }

    PathFormula path() {
        PathFormula p;
        if (is_ident("X")) {
            advance();
            p.kind = PathFormula::Kind::Next;
            p.rhs = state_formula();
            return p;
        }
        if (is_ident("F")) {
            advance();
            p.lhs = StateFormula::truth();
            if (is_symbol("<=")) {
                advance();
                p.kind = PathFormula::Kind::BoundedUntil;
                p.bound = step_bound();
            }
            p.rhs = state_formula();
            return p;
        }
        if (is_ident("G")) throw UnsupportedFragment("G");
        p.lhs = state_formula();
        if (!is_ident("U")) fail("expected U");
        advance();
        if (is_symbol("<=")) {
            advance();
            p.kind = PathFormula::Kind::BoundedUntil;
            p.bound = step_bound();
        }
        p.rhs = state_formula();
        return p;
    }

    StateFormula state_formula() {
        auto lhs = conjunction();
        while (is_symbol("|")) {
            advance();
            lhs = StateFormula::disjunction(std::move(lhs), conjunction());
        }
        return lhs;
    }

    StateFormula conjunction() {
        auto lhs = unary();
        while (is_symbol("&")) {
            advance();
            lhs = StateFormula::conjunction(std::move(lhs), unary());
        }
        return lhs;
    }

    StateFormula unary() {
        if (is_symbol("!")) {
            advance();
            return StateFormula::negation(unary());
        }
        if (is_symbol("(")) {
            advance();
            auto f = state_formula();
            expect_symbol(")");
            return f;
        }
        if (peek().type == Token::Type::String) return StateFormula::make_atom(advance().text);
        if (is_ident("true")) return advance(), StateFormula::truth();
        if (is_ident("false")) return advance(), StateFormula{StateFormula::Kind::False, {}, {}};
        if (is_ident("P") || is_ident("R")) {
            throw PropsError("nested probabilistic/reward operators are not supported (at position " +
                             std::to_string(peek().pos) + ")");
        }
        fail("expected a state formula (quoted atom, true, false, !, parentheses)");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool allow_queries_;
};

std::string decimal_or_fraction(const Rational& q) {
    mpz_class den = q.get_den();
    unsigned twos = 0;
    unsigned fives = 0;
    while (den % 2 == 0) den /= 2, ++twos;
    while (den % 5 == 0) den /= 5, ++fives;
    if (den != 1) return q.get_str();
    const unsigned digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    mpz_class scaled = q.get_num() * scale / q.get_den();
    std::string s = mpz_class(abs(scaled)).get_str();
    if (digits > 0) {
        if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
        s.insert(s.size() - digits, ".");
    }
    return (scaled < 0 ? "-" : "") + s;
}

std::string formula_string(const StateFormula& f, int parent_prec) {
    using K = StateFormula::Kind;
    switch (f.kind) {
        case K::True:
            return "true";
        case K::False:
            return "false";
        case K::Atom:
            return "\"" + f.atom + "\"";
        case K::Not:
            return "!" + formula_string(f.operands[0], 3);
        case K::And: {
            auto s = formula_string(f.operands[0], 2) + " & " + formula_string(f.operands[1], 3);
            return parent_prec > 2 ? "(" + s + ")" : s;
        }
        case K::Or: {
            auto s = formula_string(f.operands[0], 1) + " | " + formula_string(f.operands[1], 2);
            return parent_prec > 1 ? "(" + s + ")" : s;
        }
    }
    return {};
}

}  // namespace

std::vector<Requirement> parse_requirements(std::string_view text, bool allow_queries) {
    std::vector<Requirement> out;
    std::set<std::string> ids;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            // '#' inside a quoted atom is not a comment
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '#' && !quoted) {
                    line.resize(i);
                    break;
                }
            }
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Requirement r;
        try {
            r = LineParser(line, allow_queries).parse();
        } catch (const UnsupportedFragment&) {
            throw;
        } catch (const PropsError& e) {
            throw PropsError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(r.id).second) throw PropsError("line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Requirement> load_requirements(const std::string& path, bool allow_queries) {
    return parse_requirements(read_file(path), allow_queries);
}

std::string to_string(const StateFormula& f) { return formula_string(f, 0); }

std::string to_string(Relation rel) {
    switch (rel) {
        case Relation::Less:
            return "<";
        case Relation::LessEqual:
            return "<=";
        case Relation::Greater:
            return ">";
        case Relation::GreaterEqual:
            return ">=";
        case Relation::Query:
            return "=?";
    }
    return {};
}

std::string to_string(const Requirement& r) {
    std::ostringstream os;
    os << r.id << ": " << (r.kind == Requirement::Kind::Probability ? "P" : "R") << to_string(r.rel);
    if (r.rel != Relation::Query) os << decimal_or_fraction(r.bound);
    os << " [ ";
    if (r.kind == Requirement::Kind::Reward) {
        os << "F " << formula_string(r.target, 3);
    } else {
        const auto& p = r.path;
        const bool eventually = p.lhs.kind == StateFormula::Kind::True && p.kind != PathFormula::Kind::Next;
        switch (p.kind) {
            case PathFormula::Kind::Next:
                os << "X " << formula_string(p.rhs, 3);
                break;
            case PathFormula::Kind::Until:
                if (eventually) {
                    os << "F " << formula_string(p.rhs, 3);
                } else {
                    os << formula_string(p.lhs, 3) << " U " << formula_string(p.rhs, 3);
                }
                break;
            case PathFormula::Kind::BoundedUntil:
                if (eventually) {
                    os << "F<=" << p.bound << " " << formula_string(p.rhs, 3);
                } else {
                    os << formula_string(p.lhs, 3) << " U<=" << p.bound << " " << formula_string(p.rhs, 3);
                }
                break;
        }
    }
    os << " ]";
    if (r.start_label) os << " from \"" << *r.start_label << "\"";
    return os.str();
}

StateSet sat_states(const ParametricDtmc& m, const StateFormula& f) {
    using K = StateFormula::Kind;
    const auto n = m.num_states();
    StateSet out(n, false);
    switch (f.kind) {
        case K::True:
            out.assign(n, true);
            break;
        case K::False:
            break;
        case K::Atom:
            for (StateIndex s = 0; s < n; ++s) out[s] = m.labels[s].count(f.atom) > 0;
            break;
        case K::Not: {
            const auto a = sat_states(m, f.operands[0]);
            for (StateIndex s = 0; s < n; ++s) out[s] = !a[s];
            break;
        }
        case K::And:
        case K::Or: {
            const auto a = sat_states(m, f.operands[0]);
            const auto b = sat_states(m, f.operands[1]);
            for (StateIndex s = 0; s < n; ++s) out[s] = f.kind == K::And ? (a[s] && b[s]) : (a[s] || b[s]);
            break;
        }
    }
    return out;
}

StateIndex start_state(const ParametricDtmc& m, const Requirement& r) {
    if (!r.start_label) return m.init;
    std::optional<StateIndex> found;
    for (StateIndex s = 0; s < m.num_states(); ++s) {
        if (!m.labels[s].count(*r.start_label)) continue;
        if (found) throw PropsError("requirement " + r.id + ": label \"" + *r.start_label + "\" holds in more than one state");
        found = s;
    }
    if (!found) throw PropsError("requirement " + r.id + ": no state is labelled \"" + *r.start_label + "\"");
    return *found;
}

}  // namespace aqv
