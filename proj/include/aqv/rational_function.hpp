#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aqv/polynomial.hpp"

namespace aqv {

/// Real-valued assignment of the model parameters, indexed by parameter index.
using Valuation = std::vector<double>;

class ExprSyntaxError : public std::runtime_error {
   public:
    ExprSyntaxError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

   private:
    std::size_t position_;
};

class DivisionByZero : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class SingularEvaluation : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Quotient of two polynomials. The denominator is never zero and its
/// grlex-leading coefficient is 1. Equal representations compare equal
/// structurally; no polynomial GCD is taken, so p*q/q stays as is.
class RationalFunction {
   public:
    RationalFunction() : den_(Rational(1)) {}
    RationalFunction(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT(google-explicit-constructor)
    explicit RationalFunction(Polynomial num) : num_(std::move(num)), den_(Rational(1)) {}
    RationalFunction(Polynomial num, Polynomial den);

    static RationalFunction variable(std::size_t index) { return RationalFunction(Polynomial::variable(index)); }

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    /// Value of a constant function. Only meaningful when is_constant().
    Rational constant_value() const;
    bool depends_on(std::size_t index) const { return num_.depends_on(index) || den_.depends_on(index); }
    std::size_t variable_span() const;
    std::vector<std::size_t> parameters() const;

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a);
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

   private:
    void canonicalize();

    Polynomial num_;
    Polynomial den_;
};

/// Parses `+ - * / ( ) ^`, integer/decimal literals and the given parameter
/// names. Decimal literals become exact fractions.
RationalFunction parse_expr(std::string_view text, std::span<const std::string> params);

/// Prints in the grammar accepted by parse_expr.
std::string to_string(const RationalFunction& f, std::span<const std::string> names);

/// Exact num(v)/den(v), rounded to double once. Throws SingularEvaluation
/// when |den(v)| <= 1e-12.
double eval(const RationalFunction& f, std::span<const double> v);

RationalFunction partial_derivative(const RationalFunction& f, std::size_t index);

}  // namespace aqv
