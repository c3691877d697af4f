#include "aqv/rational_function.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace aqv {

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
    canonicalize();
}

void RationalFunction::canonicalize() {
    if (num_.is_zero()) {
        den_ = Polynomial(Rational(1));
        return;
    }
    const Rational lead = den_.leading_coefficient();
    if (lead != 1) {
        const Rational inv = 1 / lead;
        num_ *= inv;
        den_ *= inv;
    }
}

Rational RationalFunction::constant_value() const { return num_.constant_term() / den_.constant_term(); }

std::size_t RationalFunction::variable_span() const { return std::max(num_.variable_span(), den_.variable_span()); }

std::vector<std::size_t> RationalFunction::parameters() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < variable_span(); ++i) {
        if (depends_on(i)) out.push_back(i);
    }
    return out;
}

namespace {

bool is_one(const Polynomial& p) { return p.is_constant() && p.constant_term() == 1; }

}  // namespace

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    if (is_one(a.den_)) return RationalFunction(a.num_ * b.den_ + b.num_, b.den_);
    if (is_one(b.den_)) return RationalFunction(a.num_ + b.num_ * a.den_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a) {
    RationalFunction r = a;
    r.num_ = -r.num_;
    return r;
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw DivisionByZero("division by an identically zero rational function");
    if (a.is_zero()) return {};
    // (x/d) / (y/d) = x/y holds identically, no factoring involved.
    if (a.den_ == b.den_) return RationalFunction(a.num_, b.num_);
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

double eval(const RationalFunction& f, std::span<const double> v) {
    std::vector<Rational> point(v.begin(), v.end());
    const auto den = f.denominator().evaluate_exact(point);
    if (abs(den) <= 1e-12) throw SingularEvaluation("denominator vanishes at the given valuation");
    if (f.numerator().is_zero()) return 0.0;
    const auto num = f.numerator().evaluate_exact(point);
    return Rational(num / den).get_d();
}

RationalFunction partial_derivative(const RationalFunction& f, std::size_t index) {
    if (!f.depends_on(index)) return {};
    const auto& n = f.numerator();
    const auto& d = f.denominator();
    if (d.is_constant()) return RationalFunction(n.derivative(index), d);
    return RationalFunction(n.derivative(index) * d - n * d.derivative(index), d * d);
}

std::string to_string(const RationalFunction& f, std::span<const std::string> names) {
    if (is_one(f.denominator())) return to_string(f.numerator(), names);
    return "(" + to_string(f.numerator(), names) + ")/(" + to_string(f.denominator(), names) + ")";
}

namespace {

class ExprParser {
   public:
    ExprParser(std::string_view text, std::span<const std::string> params) : text_(text), params_(params) {}

    RationalFunction parse() {
        auto r = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return r;
    }

   private:
    [[noreturn]] void fail(const std::string& what) const { throw ExprSyntaxError(what, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    RationalFunction expression() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            } else if (accept('-')) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    RationalFunction term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * unary();
            } else if (accept('/')) {
                skip_space();
                const auto at = pos_;
                auto rhs = unary();
                if (rhs.is_zero()) throw ExprSyntaxError("division by zero", at);
                lhs = lhs / rhs;
            } else {
                return lhs;
            }
        }
    }

    RationalFunction unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    RationalFunction power() {
        auto base = primary();
        if (!accept('^')) return base;
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a non-negative integer exponent");
        const auto digits = text_.substr(start, pos_ - start);
        if (digits.size() > 4) throw ExprSyntaxError("exponent too large", start);
        const int e = std::stoi(std::string(digits));
        RationalFunction r(Rational(1));
        for (int i = 0; i < e; ++i) r = r * base;
        return r;
    }

    RationalFunction primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto r = expression();
            if (!accept(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const auto start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name(text_.substr(start, pos_ - start));
            const auto it = std::find(params_.begin(), params_.end(), name);
            if (it == params_.end()) throw ExprSyntaxError("undeclared parameter '" + name + "'", start);
            return RationalFunction::variable(static_cast<std::size_t>(it - params_.begin()));
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    RationalFunction number() {
        const auto start = pos_;
        std::string digits;
        long exponent10 = 0;
        bool seen_digit = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            digits += text_[pos_++];
            seen_digit = true;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                digits += text_[pos_++];
                --exponent10;
                seen_digit = true;
            }
        }
        if (!seen_digit) throw ExprSyntaxError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            auto save = pos_++;
            bool neg = false;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) neg = text_[pos_++] == '-';
            const auto es = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (es == pos_ || pos_ - es > 4) {
                pos_ = save;
                throw ExprSyntaxError("malformed exponent", save);
            }
            const long e = std::stol(std::string(text_.substr(es, pos_ - es)));
            exponent10 += neg ? -e : e;
        }
        mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent10)));
        Rational value = exponent10 >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
        value.canonicalize();
        return RationalFunction(value);
    }

    std::string_view text_;
    std::span<const std::string> params_;
    std::size_t pos_ = 0;
};

}  // namespace

RationalFunction parse_expr(std::string_view text, std::span<const std::string> params) {
    return ExprParser(text, params).parse();
}

}  // namespace aqv
