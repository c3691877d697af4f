#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace aqv {

using Rational = mpq_class;

/// Exponent vector indexed by parameter index. Trailing zeros are trimmed so
/// that equal monomials compare equal regardless of how they were built.
using Monomial = std::vector<std::uint32_t>;

std::uint32_t total_degree(const Monomial& m);

/// Graded lexicographic order: total degree first, then the exponent of the
/// lowest-indexed parameter decides.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// No stored term has a zero coefficient.
class Polynomial {
   public:
    using Terms = std::map<Monomial, Rational, GrlexLess>;

    Polynomial() = default;
    explicit Polynomial(const Rational& constant);
    static Polynomial variable(std::size_t index);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Constant term (zero if absent).
    Rational constant_term() const;
    /// Coefficient of the grlex-greatest monomial. Zero for the zero polynomial.
    Rational leading_coefficient() const;
    std::uint32_t degree() const;
    /// One past the highest parameter index that occurs.
    std::size_t variable_span() const;
    bool depends_on(std::size_t index) const;

    void add_term(const Monomial& m, const Rational& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Rational& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    Polynomial derivative(std::size_t index) const;

    /// Evaluates with coefficients converted to Scalar. Scalar must be
    /// constructible from double and support +, * and integer powers via pow_int.
    template <typename Scalar>
    Scalar evaluate(std::span<const Scalar> point) const;

    Rational evaluate_exact(std::span<const Rational> point) const;

   private:
    Terms terms_;
};

std::string to_string(const Polynomial& p, std::span<const std::string> names);

/// a / b when b divides a exactly, nullopt otherwise.
std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

inline double pow_int(double base, std::uint32_t e) {
    double r = 1.0;
    while (e) {
        if (e & 1U) r *= base;
        base *= base;
        e >>= 1U;
    }
    return r;
}

template <typename Scalar>
Scalar Polynomial::evaluate(std::span<const Scalar> point) const {
    Scalar sum(0.0);
    for (const auto& [m, c] : terms_) {
        Scalar t(c.get_d());
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) t = t * pow_int(point[i], m[i]);
        }
        sum = sum + t;
    }
    return sum;
}

}  // namespace aqv
